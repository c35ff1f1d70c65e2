#pragma once

// Umbrella header for the full simulator library.

#include "t2u/analytics.hpp"
#include "t2u/arrays.hpp"
#include "t2u/channel.hpp"
#include "t2u/config.hpp"
#include "t2u/constants.hpp"
#include "t2u/errors.hpp"
#include "t2u/experiment.hpp"
#include "t2u/gps.hpp"
#include "t2u/hadamard.hpp"
#include "t2u/mc.hpp"
#include "t2u/radio.hpp"
#include "t2u/results.hpp"
#include "t2u/ris.hpp"
#include "t2u/rng.hpp"
#include "t2u/scenario.hpp"
#include "t2u/version.hpp"
