// Two planning sessions over the table scene: put the fork in
// the bowl, then put the spoon in the mug. The second session runs on
// detections where the fork is hidden inside the bowl, so the fork's
// whereabouts come from the state keeper.

#include <iostream>

#include "affplan/affplan.hpp"

using namespace affplan;

int main() {
  const std::string data = AFFPLAN_DATA_DIR;
  const auto domain = pddl::parse_domain(sim::detail::read_text(data + "/pddl/manipulation.pddl"));
  auto scene = scene::load_detections(data + "/scenes/table_scene.json");

  scene::StateKeeper keeper;
  auto session = [&](const std::string& goal_text) {
    const auto built = scene::build_problem(scene.detections, scene.objects, keeper,
                                            pddl::parse_goal(goal_text), domain);
    const auto task = pddl::ground(domain, built.problem);
    const auto result = pddl::plan(task, pddl::PlannerMode::optimal);
    std::cout << "goal " << goal_text << "\n" << result.plan.to_string();
    keeper = scene::update_keeper(keeper, task, result.plan, built.anchors);
  };

  session("(in fork bowl)");
  // the fork disappears from view
  scene.detections.erase(scene.detections.begin());
  scene.objects.erase(scene.objects.begin());
  session("(and (in spoon mug) (in fork bowl))");

  std::cout << "keeper after session " << keeper.session << ":\n"
            << scene::keeper_to_json(keeper).dump(2) << "\n";
}
