#pragma once

// Umbrella header: simulation and analysis of single-coil electromechanical
// switching devices (relays, solenoid valves) modeled as a three-mode hybrid
// automaton with basic or magnetically saturating reluctance laws.

#include "reluct/bifurcation.hpp"
#include "reluct/cli.hpp"
#include "reluct/config.hpp"
#include "reluct/csv.hpp"
#include "reluct/equilibria.hpp"
#include "reluct/errors.hpp"
#include "reluct/hybrid.hpp"
#include "reluct/magnetics.hpp"
#include "reluct/params.hpp"
#include "reluct/simulate.hpp"
#include "reluct/voltage.hpp"
