#pragma once

#include "trap/lattice.hpp"
#include "trap/rng.hpp"
#include "trap/graph.hpp"
#include "trap/percolation.hpp"
#include "trap/matching.hpp"
#include "trap/game.hpp"
#include "trap/constructions.hpp"
#include "trap/bootstrap.hpp"
#include "trap/experiments.hpp"
#include "trap/image.hpp"
#include "trap/calibration.hpp"
