// eet.hpp: umbrella header

#pragma once

#include "eet/analytic.hpp"
#include "eet/config.hpp"
#include "eet/dynamics.hpp"
#include "eet/error.hpp"
#include "eet/io.hpp"
#include "eet/model.hpp"
#include "eet/numeric.hpp"
#include "eet/ode.hpp"
#include "eet/oracle.hpp"
#include "eet/sweep.hpp"
