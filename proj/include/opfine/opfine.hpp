#pragma once

#include "opfine/assumptions.hpp"
#include "opfine/category.hpp"
#include "opfine/comb.hpp"
#include "opfine/cond_dist.hpp"
#include "opfine/constraint_system.hpp"
#include "opfine/errors.hpp"
#include "opfine/finetune.hpp"
#include "opfine/ontology.hpp"
#include "opfine/rational.hpp"
#include "opfine/scenario.hpp"
#include "opfine/scenario_io.hpp"
#include "opfine/solver.hpp"
#include "opfine/space.hpp"
