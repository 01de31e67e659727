#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "affplan/pddl/search.hpp"
#include "affplan/pddl/unparse.hpp"
#include "affplan/scene/problem_builder.hpp"
#include "oracles.hpp"

using namespace affplan;
using namespace affplan::scene;
using affplan::pddl::Atom;

namespace {

constexpr auto kGrasp = static_cast<std::uint8_t>(AffordanceLabel::grasp);
constexpr auto kContain = static_cast<std::uint8_t>(AffordanceLabel::contain);

std::string data(const std::string& rel) { return std::string(AFFPLAN_DATA_DIR) + "/" + rel; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const pddl::DomainDef& domain() {
  static const auto d = pddl::parse_domain(slurp(data("pddl/manipulation.pddl")));
  return d;
}

DetectionRecord record(int x0, int y0, LabelMask mask) {
  DetectionRecord r;
  r.bbox = {x0, y0, x0 + int(mask.width()), y0 + int(mask.height())};
  r.mask = std::move(mask);
  return r;
}

// Full-box mask of one label.
DetectionRecord solid(int x0, int y0, int w, int h, AffordanceLabel l) {
  return record(x0, y0, LabelMask(std::size_t(h), std::size_t(w), static_cast<std::uint8_t>(l)));
}

double angle_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), std::numbers::pi);
  return std::min(d, std::numbers::pi - d);
}

bool has(const pddl::ProblemDef& p, const Atom& a) {
  return std::find(p.init.begin(), p.init.end(), a) != p.init.end();
}

}  // namespace

TEST(Labels, SevenAffordances) {
  EXPECT_EQ(kAffordances.size(), 7u);
  for (auto l : kAffordances) EXPECT_EQ(parse_label(label_name(l)), l);
  EXPECT_EQ(parse_label("wrap_grasp"), AffordanceLabel::wrap_grasp);
  EXPECT_FALSE(parse_label("hover"));
}

TEST(Detections, Base64RoundTrip) {
  for (std::size_t n = 0; n < 10; ++n) {
    std::vector<std::uint8_t> bytes(n);
    for (std::size_t i = 0; i < n; ++i) bytes[i] = std::uint8_t(i * 37 + 5);
    EXPECT_EQ(detail::base64_decode(detail::base64_encode(bytes)), bytes);
  }
  EXPECT_EQ(detail::base64_encode({'M', 'a', 'n'}), "TWFu");
  EXPECT_EQ(detail::base64_decode("TWE="), (std::vector<std::uint8_t>{'M', 'a'}));
  EXPECT_EQ(detail::base64_decode("TQ=="), (std::vector<std::uint8_t>{'M'}));
  EXPECT_THROW(detail::base64_decode("TWF"), DetectionFormatError);
  EXPECT_THROW(detail::base64_decode("T@=="), DetectionFormatError);
}

TEST(Detections, RowsAndBase64MasksAgree) {
  const nlohmann::json rows = {{"bbox", {0, 0, 3, 2}}, {"mask", {{"rows", {{0, 1, 1}, {4, 4, 0}}}}}};
  const nlohmann::json b64 = {{"bbox", {0, 0, 3, 2}},
                              {"mask", {{"base64", detail::base64_encode({0, 1, 1, 4, 4, 0})}}}};
  const auto a = detection_from_json(rows);
  const auto b = detection_from_json(b64);
  EXPECT_EQ(a.mask, b.mask);
  EXPECT_EQ(a.pixel_count(AffordanceLabel::contain), 2u);
  EXPECT_EQ(detection_from_json(detection_to_json(a)).mask, a.mask);
}

TEST(Detections, MalformedInputsRejected) {
  const auto bad = [](nlohmann::json j) {
    EXPECT_ANY_THROW(detection_from_json(j)) << j.dump();
  };
  bad({{"bbox", {0, 0, 2}}, {"mask", {{"rows", {{1, 1}}}}}});
  bad({{"bbox", {0, 0, 2, 1}}, {"mask", {{"rows", {{1, 1, 1}}}}}});
  bad({{"bbox", {0, 0, 2, 2}}, {"mask", {{"rows", {{1, 1}}}}}});
  bad({{"bbox", {2, 0, 2, 1}}, {"mask", {{"rows", nlohmann::json::array()}}}});
  bad({{"bbox", {0, 0, 2, 1}}, {"mask", {{"rows", {{1, 9}}}}}});
  bad({{"bbox", {0, 0, 2, 1}}, {"mask", {{"base64", detail::base64_encode({1, 1, 1})}}}});
  bad({{"bbox", {0, 0, 2, 1}}, {"mask", {{"png", "x"}}}});
  bad({{"bbox", {0, 0, 1, 1}}, {"objectness", 1.5}, {"mask", {{"rows", {{1}}}}}});
}

TEST(Detections, LoadSceneFixtures) {
  for (const char* f : {"table_scene", "spoon_plate_bowl_2", "empty_containers_2"}) {
    const auto s = load_detections(data(std::string("scenes/") + f + ".json"));
    EXPECT_FALSE(s.detections.empty()) << f;
    EXPECT_EQ(s.detections.size(), s.objects.size()) << f;
  }
  EXPECT_ANY_THROW(load_detections(data("scenes/missing.json")));
}

TEST(Iou, HandValues) {
  EXPECT_DOUBLE_EQ(iou({0, 0, 2, 2}, {0, 0, 2, 2}), 1.0);
  EXPECT_DOUBLE_EQ(iou({0, 0, 2, 2}, {2, 2, 4, 4}), 0.0);
  EXPECT_DOUBLE_EQ(iou({0, 0, 2, 2}, {1, 0, 3, 2}), 2.0 / 6.0);
}

TEST(Iou, MatchesPixelCount) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> c(0, 12), s(1, 8);
  for (int t = 0; t < 300; ++t) {
    const int ax = c(rng), ay = c(rng), bx = c(rng), by = c(rng);
    const BBox a{ax, ay, ax + s(rng), ay + s(rng)}, b{bx, by, bx + s(rng), by + s(rng)};
    EXPECT_NEAR(iou(a, b), oracle::iou(a, b), 1e-12);
  }
}

TEST(Associate, IdentityAndDisjoint) {
  std::vector<DetectionRecord> aff = {solid(0, 0, 4, 4, AffordanceLabel::grasp), solid(10, 0, 4, 4, AffordanceLabel::grasp)};
  std::vector<ObjectDetection> same = {{aff[0].bbox, "a", 1.0}, {aff[1].bbox, "b", 1.0}};
  EXPECT_EQ(associate(aff, same), (std::vector<std::optional<std::size_t>>{0, 1}));
  std::vector<ObjectDetection> far = {{{50, 50, 54, 54}, "x", 1.0}};
  EXPECT_EQ(associate(aff, far), (std::vector<std::optional<std::size_t>>{std::nullopt, std::nullopt}));
  EXPECT_THROW(associate(aff, far, 0.0), std::invalid_argument);
}

TEST(Associate, MatchesExhaustiveAssignmentWhenUnambiguous) {
  // three affordance boxes, three object boxes with distinct overlaps
  std::vector<DetectionRecord> aff = {solid(0, 0, 10, 10, AffordanceLabel::grasp),
                                      solid(20, 0, 10, 10, AffordanceLabel::grasp),
                                      solid(40, 0, 10, 10, AffordanceLabel::grasp)};
  std::vector<ObjectDetection> obj = {{{41, 1, 51, 11}, "c", 1.0}, {{1, 0, 11, 10}, "a", 1.0}, {{22, 2, 32, 12}, "b", 1.0}};
  std::vector<BBox> ab, ob;
  for (const auto& a : aff) ab.push_back(a.bbox);
  for (const auto& o : obj) ob.push_back(o.bbox);
  EXPECT_EQ(associate(aff, obj, 0.3), oracle::best_assignment(ab, ob, 0.3));
  EXPECT_EQ(associate(aff, obj, 0.3), (std::vector<std::optional<std::size_t>>{1, 2, 0}));
}

TEST(Associate, RandomSeparatedScenesMatchExhaustive) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> jitter(-2, 2), size(6, 12);
  for (int t = 0; t < 100; ++t) {
    std::vector<DetectionRecord> aff;
    std::vector<ObjectDetection> obj;
    std::vector<BBox> ab, ob;
    for (int k = 0; k < 3; ++k) {
      const int w = size(rng), h = size(rng);
      aff.push_back(solid(k * 30, 0, w, h, AffordanceLabel::grasp));
      const BBox o{k * 30 + jitter(rng), jitter(rng), k * 30 + w + jitter(rng), h + jitter(rng)};
      obj.push_back({o, "o", 1.0});
      ab.push_back(aff.back().bbox);
      ob.push_back(o);
    }
    std::shuffle(obj.begin(), obj.end(), rng);
    ob.clear();
    for (const auto& o : obj) ob.push_back(o.bbox);
    EXPECT_EQ(associate(aff, obj, 0.3), oracle::best_assignment(ab, ob, 0.3));
  }
}

TEST(GraspPose, HorizontalStrip) {
  const auto rec = record(5, 7, LabelMask(1, 10, kGrasp));
  const auto g = grasp_pose(rec);
  EXPECT_NEAR(g.theta, 0.0, 1e-9);
  EXPECT_NEAR(g.center.x, 5 + 4.5, 1e-12);
  EXPECT_NEAR(g.center.y, 7.0, 1e-12);
}

TEST(GraspPose, DiagonalPair) {
  LabelMask m(2, 2, 0);
  m(0, 0) = m(1, 1) = kGrasp;
  const auto g = grasp_pose(record(0, 0, m));
  EXPECT_NEAR(g.theta, std::numbers::pi / 4, 1e-9);
  EXPECT_NEAR(g.center.x, 0.5, 1e-12);
}

TEST(GraspPose, VerticalStripIsHalfPi) {
  EXPECT_NEAR(grasp_pose(record(0, 0, LabelMask(6, 1, kGrasp))).theta, std::numbers::pi / 2, 1e-9);
}

TEST(GraspPose, TooFewPixels) {
  LabelMask m(3, 3, 0);
  m(1, 1) = kGrasp;
  try {
    grasp_pose(record(0, 0, m));
    FAIL();
  } catch (const AffordanceAbsent& e) {
    EXPECT_NE(std::string(e.what()).find("grasp"), std::string::npos);
  }
}

TEST(GraspPose, MatchesCovarianceOracleOnBlobs) {
  std::mt19937_64 rng(3);
  std::bernoulli_distribution on(0.45);
  for (int t = 0; t < 200; ++t) {
    LabelMask m(7, 9, 0);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t r = 0; r < 7; ++r)
      for (std::size_t c = 0; c < 9; ++c)
        if (on(rng)) {
          m(r, c) = kGrasp;
          pts.emplace_back(double(c) + 3, double(r) + 4);
        }
    if (pts.size() < 2) continue;
    const auto want = oracle::principal_axis(pts);
    if (want.degenerate) continue;
    const auto got = grasp_pose(record(3, 4, m));
    EXPECT_NEAR(got.center.x, want.cx, 1e-9);
    EXPECT_NEAR(got.center.y, want.cy, 1e-9);
    EXPECT_LT(angle_gap(got.theta, want.theta), 1e-9);
    EXPECT_GE(got.theta, 0.0);
    EXPECT_LT(got.theta, std::numbers::pi);
  }
}

TEST(GraspPose, RotationByQuarterTurnShiftsThetaByHalfPi) {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution on(0.4);
  for (int t = 0; t < 200; ++t) {
    const std::size_t h = 3 + t % 5, w = 4 + t % 7;
    LabelMask m(h, w, 0), rot(w, h, 0);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c)
        if (on(rng)) {
          m(r, c) = kGrasp;
          rot(c, h - 1 - r) = kGrasp;
          pts.emplace_back(double(c), double(r));
        }
    if (pts.size() < 2 || oracle::principal_axis(pts).degenerate) continue;
    const double a = grasp_pose(record(0, 0, m)).theta;
    const double b = grasp_pose(record(0, 0, rot)).theta;
    EXPECT_LT(angle_gap(b, a + std::numbers::pi / 2), 1e-9) << a << " " << b;
  }
}

TEST(PlaceTarget, Examples) {
  EXPECT_NEAR(place_target(solid(10, 20, 4, 6, AffordanceLabel::contain), AffordanceLabel::contain).x, 11.5, 1e-12);
  EXPECT_NEAR(place_target(solid(10, 20, 4, 6, AffordanceLabel::contain), AffordanceLabel::contain).y, 22.5, 1e-12);
  LabelMask one(3, 3, 0);
  one(2, 1) = static_cast<std::uint8_t>(AffordanceLabel::support);
  const auto p = place_target(record(0, 0, one), AffordanceLabel::support);
  EXPECT_EQ(p.x, 1.0);
  EXPECT_EQ(p.y, 2.0);
  // L shape
  LabelMask l(3, 3, 0);
  for (std::size_t r = 0; r < 3; ++r) l(r, 0) = kContain;
  l(2, 1) = l(2, 2) = kContain;
  const auto q = place_target(record(0, 0, l), AffordanceLabel::contain);
  EXPECT_NEAR(q.x, (0 + 0 + 0 + 1 + 2) / 5.0, 1e-12);
  EXPECT_NEAR(q.y, (0 + 1 + 2 + 2 + 2) / 5.0, 1e-12);
  EXPECT_THROW(place_target(record(0, 0, l), AffordanceLabel::support), AffordanceAbsent);
  EXPECT_THROW(place_target(record(0, 0, l), AffordanceLabel::grasp), std::invalid_argument);
}

TEST(BuildProblem, ForkAndBowl) {
  const std::vector<DetectionRecord> aff = {solid(0, 0, 5, 10, AffordanceLabel::grasp),
                                            solid(20, 0, 10, 10, AffordanceLabel::contain)};
  const std::vector<ObjectDetection> obj = {{aff[0].bbox, "fork", 0.9}, {aff[1].bbox, "bowl", 0.9}};
  const auto built = build_problem(aff, obj, {}, pddl::parse_goal("(in fork bowl)"), domain());
  const auto& p = built.problem;
  for (const Atom& a : {Atom{"graspable", {"fork"}}, Atom{"container", {"bowl"}}, Atom{"empty", {"bowl"}},
                        Atom{"on-table", {"fork"}}, Atom{"on-table", {"bowl"}}, Atom{"hand-empty", {}}})
    EXPECT_TRUE(has(p, a)) << pddl::to_string(a);
  EXPECT_FALSE(has(p, {"graspable", {"bowl"}}));
  EXPECT_EQ(built.detected, (std::vector<std::string>{"fork", "bowl"}));
  EXPECT_NO_THROW(pddl::parse_problem(pddl::to_pddl(p), domain()));
}

TEST(BuildProblem, SmallRegionsBelowThresholdIgnored) {
  LabelMask m(10, 10, kContain);
  for (std::size_t i = 0; i < 24; ++i) m[i] = kGrasp;
  const auto built = build_problem({record(0, 0, m)}, {}, {}, {}, domain());
  EXPECT_EQ(built.detected, (std::vector<std::string>{"obj1"}));
  EXPECT_FALSE(has(built.problem, {"graspable", {"obj1"}}));
  EXPECT_TRUE(has(built.problem, {"container", {"obj1"}}));
  SceneConfig cfg;
  cfg.min_pixels = 24;
  EXPECT_TRUE(has(build_problem({record(0, 0, m)}, {}, {}, {}, domain(), cfg).problem, {"graspable", {"obj1"}}));
}

TEST(BuildProblem, DuplicateCategoriesGetSuffixes) {
  const std::vector<DetectionRecord> aff = {solid(0, 0, 5, 10, AffordanceLabel::grasp),
                                            solid(20, 0, 5, 10, AffordanceLabel::grasp)};
  const std::vector<ObjectDetection> obj = {{aff[0].bbox, "Spoon", 0.9}, {aff[1].bbox, "spoon", 0.9}};
  EXPECT_EQ(build_problem(aff, obj, {}, {}, domain()).detected, (std::vector<std::string>{"spoon", "spoon-2"}));
}

TEST(BuildProblem, KeeperPassthroughWithoutDetections) {
  StateKeeper k;
  k.session = 1;
  k.facts = {{{"in", {"spoon", "plate"}}, 1}, {{"graspable", {"spoon"}}, 1}, {{"container", {"plate"}}, 1}};
  const auto built = build_problem({}, {}, k, pddl::parse_goal("(in spoon plate)"), domain());
  const auto& p = built.problem;
  EXPECT_NE(p.find_object("spoon"), nullptr);
  EXPECT_NE(p.find_object("plate"), nullptr);
  EXPECT_TRUE(has(p, {"in", {"spoon", "plate"}}));
  EXPECT_FALSE(has(p, {"empty", {"plate"}}));
  EXPECT_FALSE(has(p, {"on-table", {"spoon"}}));
}

TEST(BuildProblem, UngroundableGoal) {
  try {
    build_problem({}, {}, {}, pddl::parse_goal("(in fork bowl)"), domain());
    FAIL();
  } catch (const UngroundableGoal& e) {
    EXPECT_EQ(e.missing(), (std::vector<std::string>{"fork", "bowl"}));
  }
}

TEST(BuildProblem, FreshCapabilitiesOverrideKeeper) {
  StateKeeper k;
  k.facts = {{{"container", {"cup"}}, 1}, {{"on-table", {"cup"}}, 1}};
  const std::vector<DetectionRecord> aff = {solid(0, 0, 6, 6, AffordanceLabel::support)};
  const std::vector<ObjectDetection> obj = {{aff[0].bbox, "cup", 0.9}};
  const auto p = build_problem(aff, obj, k, {}, domain()).problem;
  EXPECT_FALSE(has(p, {"container", {"cup"}}));
  EXPECT_TRUE(has(p, {"supporter", {"cup"}}));
}

TEST(BuildProblem, AlwaysValidAgainstDomain) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> lab(0, 7);
  for (int t = 0; t < 100; ++t) {
    std::vector<DetectionRecord> aff;
    std::vector<ObjectDetection> obj;
    for (int k = 0; k < 3; ++k) {
      LabelMask m(6, 6, 0);
      for (std::size_t i = 0; i < 36; ++i) m[i] = std::uint8_t(lab(rng) == 0 ? 0 : lab(rng));
      aff.push_back(record(k * 10, 0, m));
      if (k != 1) obj.push_back({aff.back().bbox, k ? "thing two" : "3d-cup", 0.8});
    }
    SceneConfig cfg;
    cfg.min_pixels = 4;
    const auto p = build_problem(aff, obj, {}, {}, domain(), cfg).problem;
    EXPECT_NO_THROW(pddl::parse_problem(pddl::to_pddl(p), domain()));
  }
}

TEST(Keeper, JsonRoundTripAndVersion) {
  StateKeeper k;
  k.session = 3;
  k.facts = {{{"in", {"fork", "bowl"}}, 2}, {{"on-table", {"bowl"}}, 1}};
  k.anchors["bowl"] = {{10, 20}, 0.5, Point{11, 21}};
  const auto j = keeper_to_json(k);
  EXPECT_EQ(j.at("version"), kKeeperVersion);
  const auto back = keeper_from_json(j);
  EXPECT_EQ(back.facts, k.facts);
  EXPECT_EQ(back.session, 3u);
  ASSERT_TRUE(back.anchors.at("bowl").place);
  EXPECT_EQ(back.anchors.at("bowl").place->y, 21.0);

  auto wrong = j;
  wrong["version"] = 99;
  EXPECT_THROW(keeper_from_json(wrong), KeeperError);
  EXPECT_THROW(keeper_from_json({{"facts", nlohmann::json::array()}}), KeeperError);
}

TEST(Keeper, InvariantsEnforced) {
  StateKeeper two;
  two.facts = {{{"in", {"fork", "bowl"}}, 1}, {{"in", {"fork", "mug"}}, 1}};
  EXPECT_THROW(two.check_invariants(), KeeperError);
  StateKeeper both;
  both.facts = {{{"in", {"fork", "bowl"}}, 1}, {{"empty", {"bowl"}}, 1}};
  EXPECT_THROW(both.check_invariants(), KeeperError);
}

TEST(UpdateKeeper, EmptyPlanKeepsPersistentInitFacts) {
  const auto scene = load_detections(data("scenes/table_scene.json"));
  const auto built = build_problem(scene.detections, scene.objects, {}, {}, domain());
  const auto task = pddl::ground(domain(), built.problem);
  const auto k = update_keeper({}, task, {}, built.anchors);
  EXPECT_EQ(k.session, 1u);
  EXPECT_FALSE(k.holds({"hand-empty", {}}));
  for (const auto& a : built.problem.init) {
    if (a.predicate != "hand-empty") {
      EXPECT_TRUE(k.holds(a)) << pddl::to_string(a);
    }
  }
  EXPECT_EQ(k.anchors.size(), 4u);
}

TEST(UpdateKeeper, ForkIntoBowlThenSecondSession) {
  const auto scene = load_detections(data("scenes/table_scene.json"));
  const auto built = build_problem(scene.detections, scene.objects, {}, pddl::parse_goal("(in fork bowl)"), domain());
  const auto task = pddl::ground(domain(), built.problem);
  const auto r = pddl::plan(task, pddl::PlannerMode::optimal);
  ASSERT_TRUE(r.solved);
  const auto k = update_keeper({}, task, r.plan, built.anchors);
  EXPECT_TRUE(k.holds({"in", {"fork", "bowl"}}));
  EXPECT_FALSE(k.holds({"empty", {"bowl"}}));
  EXPECT_FALSE(k.holds({"on-table", {"fork"}}));
  const auto bowl = k.anchors.at("bowl");
  EXPECT_EQ(k.anchors.at("fork").center.x, bowl.place->x);

  // independent progression agrees with the keeper
  std::vector<std::pair<std::string, std::vector<std::string>>> steps;
  for (const auto& s : r.plan.steps) steps.emplace_back(s.action, s.args);
  const auto end = oracle::progress(domain(), {built.problem.init.begin(), built.problem.init.end()}, steps);
  ASSERT_TRUE(end);
  for (const auto& a : *end) {
    if (a.predicate != "hand-empty") {
      EXPECT_TRUE(k.holds(a)) << pddl::to_string(a);
    }
  }

  // the fork is no longer visible
  auto later = scene;
  later.detections.erase(later.detections.begin());
  later.objects.erase(later.objects.begin());
  const auto second = build_problem(later.detections, later.objects, k,
                                    pddl::parse_goal("(and (in spoon mug) (in fork bowl))"), domain());
  EXPECT_TRUE(has(second.problem, {"in", {"fork", "bowl"}}));
  EXPECT_TRUE(has(second.problem, {"graspable", {"fork"}}));
  const auto task2 = pddl::ground(domain(), second.problem);
  const auto r2 = pddl::plan(task2, pddl::PlannerMode::optimal);
  ASSERT_TRUE(r2.solved);
  EXPECT_EQ(r2.plan.cost(), 2u);
  const auto k2 = update_keeper(k, task2, r2.plan, second.anchors);
  EXPECT_EQ(k2.session, 2u);
  EXPECT_EQ(k2.since({"in", {"fork", "bowl"}}), std::optional<std::uint64_t>(1));
  EXPECT_EQ(k2.since({"in", {"spoon", "mug"}}), std::optional<std::uint64_t>(2));
}

TEST(UpdateKeeper, HeldObjectReturnsToTable) {
  const auto scene = load_detections(data("scenes/table_scene.json"));
  const auto built = build_problem(scene.detections, scene.objects, {}, pddl::parse_goal("(holding spoon)"), domain());
  const auto task = pddl::ground(domain(), built.problem);
  const auto r = pddl::plan(task);
  ASSERT_TRUE(r.solved);
  const auto k = update_keeper({}, task, r.plan);
  EXPECT_TRUE(k.holds({"on-table", {"spoon"}}));
  EXPECT_FALSE(k.holds({"holding", {"spoon"}}));
}

TEST(UpdateKeeper, RejectsInvalidPlan) {
  const auto scene = load_detections(data("scenes/table_scene.json"));
  const auto built = build_problem(scene.detections, scene.objects, {}, pddl::parse_goal("(in fork bowl)"), domain());
  const auto task = pddl::ground(domain(), built.problem);
  EXPECT_THROW(update_keeper({}, task, pddl::parse_plan("(place-in fork bowl)")), KeeperError);
}
