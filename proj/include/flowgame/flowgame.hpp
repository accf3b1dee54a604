#pragma once

#include "flowgame/analysis.hpp"
#include "flowgame/dynamics.hpp"
#include "flowgame/io.hpp"
#include "flowgame/metric.hpp"
#include "flowgame/metric_space.hpp"
#include "flowgame/model.hpp"
#include "flowgame/propagation.hpp"
#include "flowgame/scenarios.hpp"
#include "flowgame/types.hpp"
