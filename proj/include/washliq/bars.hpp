#pragma once

#include <cstdint>
#include <vector>

#include "washliq/date.hpp"

namespace washliq {

struct Tick {
    std::int64_t timestamp_ms = 0;
    double price = 0.0;
    double quantity = 0.0;
};

// One minute of trading: simple return and dollar amount.
struct MinuteBar {
    std::int32_t minute_index = 0;
    double ret = 0.0;
    double amount = 0.0;
};

// Exactly T bars with minute_index 0..T-1 once produced by ingest.
struct TradingDay {
    Date date;
    std::int32_t minutes = 0;
    std::vector<MinuteBar> bars;
};

}  // namespace washliq
