#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "washliq/calendar.hpp"
#include "washliq/detect.hpp"
#include "washliq/error.hpp"
#include "washliq/liquidity.hpp"
#include "washliq/treatment.hpp"

namespace washliq {

inline Compounding parse_compounding(std::string_view s) {
    if (s == "product") return Compounding::product;
    if (s == "mean") return Compounding::mean;
    throw ParameterError("compounding must be product or mean");
}

// Settings shared by every CLI step.
struct RunConfig {
    std::string calendar = "crypto";
    std::optional<std::uint64_t> seed;
    std::string compounding = "product";
    TreatmentSpec treatment{};
    double cap = 10.0;
    double threshold = 1.0;

    void validate() const {
        CalendarSpec::parse(calendar);
        parse_compounding(compounding);
        treatment.validate();
        if (!(cap > 0.0)) throw ParameterError("cap must be positive");
        if (!(threshold > 0.0)) throw ParameterError("threshold must be positive");
    }

    CalendarSpec calendar_spec() const { return CalendarSpec::parse(calendar); }

    LiquidityOptions liquidity() const {
        LiquidityOptions o;
        o.cap = cap;
        o.compounding = parse_compounding(compounding);
        return o;
    }

    Thresholds thresholds() const {
        Thresholds t;
        t.jump = threshold;
        t.diffusion = threshold;
        t.cap = cap;
        return t;
    }
};

}  // namespace washliq
