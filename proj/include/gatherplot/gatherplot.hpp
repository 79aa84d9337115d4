#pragma once

#include <gatherplot/csv.hpp>
#include <gatherplot/data_model.hpp>
#include <gatherplot/error.hpp>
#include <gatherplot/gather.hpp>
#include <gatherplot/geometry.hpp>
#include <gatherplot/json_io.hpp>
#include <gatherplot/layout.hpp>
#include <gatherplot/lens.hpp>
#include <gatherplot/overlap.hpp>
#include <gatherplot/service.hpp>
#include <gatherplot/svg.hpp>
#include <gatherplot/ticks.hpp>
