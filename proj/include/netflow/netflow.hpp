#pragma once

#include "netflow/diagnostics.hpp"
#include "netflow/expander.hpp"
#include "netflow/flow.hpp"
#include "netflow/geometry.hpp"
#include "netflow/graph_patch.hpp"
#include "netflow/io.hpp"
#include "netflow/linalg.hpp"
#include "netflow/presets.hpp"
#include "netflow/resample.hpp"
#include "netflow/simulation.hpp"
#include "netflow/svg.hpp"
#include "netflow/transitions.hpp"
