#!/usr/bin/env python3
"""Regenerates the scene, scenario and metric fixtures under data/.

Run from the repository root: python3 tools/gen_fixtures.py
Output is deterministic.
"""

import base64
import json
import pathlib

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data"

BG, GRASP, CUT, SCOOP, CONTAIN, POUND, SUPPORT, WRAP = range(8)

# Object templates: (height, width, [(label, r0, c0, r1, c1), ...]) with
# half-open region bounds relative to the box.
TEMPLATES = {
    "fork": (40, 10, [(GRASP, 14, 3, 40, 7)]),
    "knife": (44, 8, [(GRASP, 24, 2, 44, 6), (CUT, 0, 2, 24, 6)]),
    "spoon": (40, 10, [(GRASP, 12, 3, 40, 7), (SCOOP, 0, 1, 12, 9)]),
    "trowel": (44, 14, [(GRASP, 22, 5, 44, 9), (SCOOP, 0, 1, 22, 13)]),
    "bowl": (30, 40, [(WRAP, 0, 0, 30, 4), (WRAP, 0, 36, 30, 40), (CONTAIN, 4, 4, 26, 36)]),
    "mug": (30, 34, [(CONTAIN, 2, 2, 28, 24), (GRASP, 8, 26, 22, 33)]),
    "cup": (28, 30, [(CONTAIN, 2, 2, 26, 22), (GRASP, 8, 23, 20, 29)]),
    "pot": (36, 48, [(WRAP, 0, 0, 36, 5), (WRAP, 0, 43, 36, 48), (CONTAIN, 4, 5, 32, 43)]),
    "plate": (30, 44, [(SUPPORT, 3, 3, 27, 41)]),
}


def mask_for(kind):
    h, w, regions = TEMPLATES[kind]
    m = np.zeros((h, w), dtype=np.uint8)
    for label, r0, c0, r1, c1 in regions:
        m[r0:r1, c0:c1] = label
    return m


def detection(kind, x0, y0, objectness=0.95, rows=False):
    m = mask_for(kind)
    h, w = m.shape
    present = [float(np.count_nonzero(m == lab) > 0) for lab in range(1, 8)]
    attrs = [0.9 if p else 0.05 for p in present]
    rec = {"bbox": [x0, y0, x0 + w, y0 + h], "objectness": objectness, "attributes": attrs}
    if rows:
        rec["mask"] = {"rows": m.tolist()}
    else:
        rec["mask"] = {"base64": base64.b64encode(m.tobytes()).decode("ascii")}
    return rec


def obj(kind, x0, y0, score=0.9, shift=1):
    h, w, _ = TEMPLATES[kind]
    return {"bbox": [x0 + shift, y0, x0 + w + shift, y0 + h], "category": kind, "score": score}


def scene(layout, rows=False):
    return {
        "detections": [detection(k, x, y, rows=rows) for k, x, y in layout],
        "objects": [obj(k, x, y) for k, x, y in layout],
    }


def write_json(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=1) + "\n")


def scenes():
    s = ROOT / "scenes"
    write_json(s / "table_scene.json",
               scene([("fork", 20, 20), ("bowl", 60, 20), ("spoon", 120, 20), ("mug", 160, 20)],
                     rows=True))
    write_json(s / "knife_spoon_bowl.json",
               scene([("knife", 20, 30), ("spoon", 60, 30), ("bowl", 100, 30)]))
    write_json(s / "scoop_beans.json",
               scene([("trowel", 10, 20), ("spoon", 40, 20), ("pot", 80, 20), ("bowl", 150, 20)]))
    write_json(s / "spoon_plate_bowl_1.json",
               scene([("spoon", 20, 20), ("plate", 60, 20), ("bowl", 130, 20)]))
    # the spoon now lies on the plate and is not detected
    write_json(s / "spoon_plate_bowl_2.json", scene([("plate", 60, 20), ("bowl", 130, 20)]))
    write_json(s / "empty_containers_1.json",
               scene([("spoon", 20, 20), ("fork", 50, 20), ("bowl", 90, 20), ("cup", 150, 20)]))
    # the spoon is inside the bowl and hidden
    write_json(s / "empty_containers_2.json",
               scene([("fork", 50, 20), ("bowl", 90, 20), ("cup", 150, 20)]))


def scenario(name, phases, keeper=True, faults=(), trials=10):
    return {
        "name": name,
        "domain": "../pddl/manipulation.pddl",
        "trials": trials,
        "planner": "fast",
        "keeper": keeper,
        "seed": 7,
        "phases": phases,
        "faults": list(faults),
    }


def scenarios():
    s = ROOT / "scenarios"
    write_json(s / "knife_spoon_bowl.json", scenario(
        "pick knife or spoon into bowl",
        [{"detections": "../scenes/knife_spoon_bowl.json",
          "goals": ["(in knife bowl)", "(in spoon bowl)"]}]))
    write_json(s / "scoop_beans.json", scenario(
        "select trowel or spoon to scoop beans",
        [{"detections": "../scenes/scoop_beans.json",
          "scene_facts": [["has-beans", "pot"]],
          "goals": ["(and (has-beans bowl) (holding trowel))",
                    "(and (has-beans bowl) (holding spoon))"]}]))
    plate_phases = [
        {"detections": "../scenes/spoon_plate_bowl_1.json", "goals": ["(on spoon plate)"]},
        {"detections": "../scenes/spoon_plate_bowl_2.json", "goals": ["(in spoon bowl)"]},
    ]
    write_json(s / "spoon_plate_bowl.json",
               scenario("grasp spoon to plate then move to bowl", plate_phases))
    write_json(s / "spoon_plate_bowl_no_keeper.json",
               scenario("grasp spoon to plate then move to bowl (no keeper)", plate_phases,
                        keeper=False))
    write_json(s / "empty_containers.json", scenario(
        "place objects into empty containers",
        [{"detections": "../scenes/empty_containers_1.json", "goals": ["(in spoon bowl)"]},
         {"detections": "../scenes/empty_containers_2.json",
          "goals": ["(and (not (on-table fork)) (hand-empty))"]}]))
    write_json(s / "faults.json", scenario(
        "pick knife or spoon into bowl with faults",
        [{"detections": "../scenes/knife_spoon_bowl.json",
          "goals": ["(in knife bowl)", "(in spoon bowl)"]}],
        faults=[
            {"trial": 1, "kind": "drop_detection", "index": 1},
            {"trial": 2, "kind": "corrupt_mask", "index": 2, "label": "contain"},
            {"trial": 4, "kind": "action", "step": 1},
            {"trial": 6, "kind": "drop_detection"},
        ], trials=8))


def disk(h, w, cy, cx, r):
    yy, xx = np.mgrid[0:h, 0:w]
    return ((yy - cy) ** 2 + (xx - cx) ** 2 <= r * r)


def write_pgm(path, arr):
    path.parent.mkdir(parents=True, exist_ok=True)
    arr = np.asarray(arr, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (arr.shape[1], arr.shape[0]))
        f.write(arr.tobytes())


def metric_maps():
    rng = np.random.default_rng(3)
    m = ROOT / "metrics"
    h, w = 32, 40
    shapes = {
        "disk": disk(h, w, 16, 20, 8),
        "bar": np.pad(np.ones((6, 24), bool), ((13, 13), (8, 8))),
        "two_blobs": disk(h, w, 10, 10, 5) | disk(h, w, 22, 30, 6),
    }
    for name, gt in shapes.items():
        write_pgm(m / "gt" / f"{name}.pgm", gt * 255)
        soft = np.clip(gt * 0.8 + rng.normal(0.0, 0.15, gt.shape), 0, 1)
        shifted = np.roll(soft, 2, axis=1)
        write_pgm(m / "pred" / f"{name}.pgm", np.round(shifted * 255))
    # three ranks of one instance, each with its own ground truth
    for r, radius in enumerate((8, 6, 4), start=1):
        gt = disk(h, w, 16, 20, radius)
        write_pgm(m / "ranked" / "gt" / f"cup.r{r}.pgm", gt * 255)
        pred = np.clip(gt * 0.9 + rng.normal(0.0, 0.1, gt.shape), 0, 1)
        write_pgm(m / "ranked" / "pred" / f"cup.r{r}.pgm", np.round(pred * 255))
    write_pgm(m / "mismatch" / "gt" / "disk.pgm", shapes["disk"] * 255)
    write_pgm(m / "mismatch" / "pred" / "disk.pgm", np.zeros((16, 16)))


if __name__ == "__main__":
    scenes()
    scenarios()
    metric_maps()
