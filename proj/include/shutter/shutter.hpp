#ifndef SHUTTER_SHUTTER_HPP
#define SHUTTER_SHUTTER_HPP

#include "analysis.hpp"
#include "config.hpp"
#include "core_types.hpp"
#include "error.hpp"
#include "faddeeva.hpp"
#include "moshinsky.hpp"
#include "oracle_cn.hpp"
#include "propagator.hpp"
#include "resonances.hpp"
#include "stationary.hpp"
#include "sweeps.hpp"

#endif
