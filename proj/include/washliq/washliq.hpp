#pragma once

#include "washliq/bars.hpp"
#include "washliq/calendar.hpp"
#include "washliq/config.hpp"
#include "washliq/csv.hpp"
#include "washliq/date.hpp"
#include "washliq/detect.hpp"
#include "washliq/error.hpp"
#include "washliq/ingest.hpp"
#include "washliq/liquidity.hpp"
#include "washliq/panel_io.hpp"
#include "washliq/rng.hpp"
#include "washliq/simulate.hpp"
#include "washliq/special.hpp"
#include "washliq/stats.hpp"
#include "washliq/treatment.hpp"
