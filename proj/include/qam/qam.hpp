// qam.hpp — Umbrella header for the absorption machine library

#pragma once

#include "config.hpp"
#include "csv.hpp"
#include "dissipation.hpp"
#include "dynamics.hpp"
#include "linalg.hpp"
#include "models.hpp"
#include "parallel.hpp"
#include "runners.hpp"
#include "stochastic.hpp"
#include "thermo.hpp"
