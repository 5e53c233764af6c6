#pragma once

#include "pcosync/core.hpp"
#include "pcosync/topology.hpp"
#include "pcosync/state.hpp"
#include "pcosync/mechanisms.hpp"
#include "pcosync/rng.hpp"
#include "pcosync/adversary.hpp"
#include "pcosync/engine.hpp"
#include "pcosync/metrics.hpp"
#include "pcosync/config.hpp"
#include "pcosync/scenario.hpp"
#include "pcosync/io.hpp"
#include "pcosync/commands.hpp"
