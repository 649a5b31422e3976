#pragma once

#include "flipchain/rng.hpp"
#include "flipchain/graph.hpp"
#include "flipchain/graph_io.hpp"
#include "flipchain/instances.hpp"
#include "flipchain/partition.hpp"
#include "flipchain/plan_io.hpp"
#include "flipchain/scores.hpp"
#include "flipchain/constraints.hpp"
#include "flipchain/flip_chain.hpp"
#include "flipchain/initializer.hpp"
#include "flipchain/diagnostics.hpp"
