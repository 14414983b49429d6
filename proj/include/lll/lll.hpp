#pragma once

#include "lll/analysis.hpp"
#include "lll/apps/graph.hpp"
#include "lll/apps/hypergraph.hpp"
#include "lll/apps/ksat.hpp"
#include "lll/apps/latin.hpp"
#include "lll/apps/nonrep.hpp"
#include "lll/apps/ramsey.hpp"
#include "lll/engine.hpp"
#include "lll/entropy.hpp"
#include "lll/error.hpp"
#include "lll/events.hpp"
#include "lll/instances.hpp"
#include "lll/io.hpp"
#include "lll/oracle.hpp"
#include "lll/report.hpp"
#include "lll/rng.hpp"
#include "lll/space.hpp"
#include "lll/stats.hpp"
#include "lll/swapping.hpp"
#include "lll/truncated.hpp"
#include "lll/witness.hpp"
