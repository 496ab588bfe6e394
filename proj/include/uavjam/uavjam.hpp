#pragma once

#include "uavjam/errors.hpp"
#include "uavjam/scenario.hpp"
#include "uavjam/signal_model.hpp"
#include "uavjam/constraints.hpp"
#include "uavjam/gradproj.hpp"
#include "uavjam/placement.hpp"
#include "uavjam/admm.hpp"
#include "uavjam/baselines.hpp"
#include "uavjam/io.hpp"
#include "uavjam/sweep.hpp"
#include "uavjam/plot.hpp"
