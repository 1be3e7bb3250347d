#pragma once

#include "uivtsp/cli.hpp"
#include "uivtsp/context.hpp"
#include "uivtsp/delay.hpp"
#include "uivtsp/encoding.hpp"
#include "uivtsp/guard.hpp"
#include "uivtsp/hash.hpp"
#include "uivtsp/ledger.hpp"
#include "uivtsp/orchestrator.hpp"
#include "uivtsp/report.hpp"
#include "uivtsp/simulator.hpp"
#include "uivtsp/svg.hpp"
#include "uivtsp/token.hpp"
#include "uivtsp/trust.hpp"
#include "uivtsp/types.hpp"
