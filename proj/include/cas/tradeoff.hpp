#pragma once

namespace cas {

// One operating point of the sensing/communication tradeoff. Rates in nats.
struct TradeoffPoint
{
    double d_s = 0.0;       // estimation distortion
    double d_c = 0.0;       // reconstruction distortion of the estimate
    double d_total = 0.0;   // d_s + d_c
    double rate = 0.0;      // R(d_c)
    double capacity = 0.0;  // rate the link supports (capacity or MI)
    double budget = 0.0;    // resource budget the point was computed under
};

} // namespace cas
