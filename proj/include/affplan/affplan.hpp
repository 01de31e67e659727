#pragma once

#include "affplan/tensor.hpp"
#include "affplan/attention.hpp"
#include "affplan/losses.hpp"
#include "affplan/grid.hpp"
#include "affplan/metrics.hpp"
#include "affplan/image_io.hpp"
#include "affplan/pddl/sexpr.hpp"
#include "affplan/pddl/model.hpp"
#include "affplan/pddl/parse.hpp"
#include "affplan/pddl/unparse.hpp"
#include "affplan/pddl/task.hpp"
#include "affplan/pddl/search.hpp"
#include "affplan/pddl/validate.hpp"
#include "affplan/scene/detection.hpp"
#include "affplan/scene/geometry.hpp"
#include "affplan/scene/association.hpp"
#include "affplan/scene/keeper.hpp"
#include "affplan/scene/problem_builder.hpp"
#include "affplan/sim/world.hpp"
#include "affplan/sim/scenario.hpp"
