#pragma once

// Umbrella header for the generalized Blotto equilibrium library.

#include "gcbg/errors.hpp"
#include "gcbg/game.hpp"
#include "gcbg/solver.hpp"
#include "gcbg/oracle.hpp"
#include "gcbg/config.hpp"
#include "gcbg/commands.hpp"
