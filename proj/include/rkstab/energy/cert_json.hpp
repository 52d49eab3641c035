#pragma once

#include <string>

#include "json.hpp"
#include "rkstab/energy/certify.hpp"

namespace rkstab::energy {

inline nlohmann::json to_json(const LPolynomial& p) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [power, c] : p.coeffs()) {
        out[std::to_string(power)] = rkstab::to_string(c);
    }
    return out;
}

inline nlohmann::json to_json(const ReductionTrace& trace) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& step : trace) {
        out.push_back({{"side", std::string(to_string(step.side))},
                       {"dropped_factor", rkstab::to_string(step.dropped_factor)},
                       {"split", to_json(step.split)},
                       {"matched_polynomial", to_json(step.matched)},
                       {"remainder", to_json(step.remainder)},
                       {"text", step.split.str() + " = " + step.matched.str() + " + (" + step.remainder.str() + ")"}});
    }
    return out;
}

inline nlohmann::json to_json(const CertBound& bound, const std::string& method, BoundMode mode) {
    nlohmann::json poly = nlohmann::json::array();
    for (const auto& c : bound.bound_poly) {
        poly.push_back(rkstab::to_string(c));
    }
    nlohmann::json retained = nlohmann::json::object();
    for (const auto& [order, c] : bound.retained_negatives) {
        retained[std::to_string(order)] = rkstab::to_string(c);
    }
    return {{"status", "certified"},
            {"method", method},
            {"mode", std::string(to_string(mode))},
            {"anchor_order", bound.anchor_order},
            {"bound_poly", poly},
            {"retained_negatives", retained},
            {"root",
             {{"lo", rkstab::to_string(bound.root.lo)},
              {"hi", rkstab::to_string(bound.root.hi)},
              {"approx", bound.root.approx()}}},
            {"trace", to_json(bound.trace)}};
}

inline nlohmann::json to_json(const CertFailure& failure, const std::string& method, BoundMode mode) {
    return {{"status", "failed"},
            {"method", method},
            {"mode", std::string(to_string(mode))},
            {"reason", std::string(to_string(failure.reason))},
            {"detail", failure.detail},
            {"state", {{"left", to_json(failure.state_at_failure.left)},
                       {"right", to_json(failure.state_at_failure.right)},
                       {"text", "<(" + failure.state_at_failure.left.str() + ") u, (" +
                                    failure.state_at_failure.right.str() + ") u>"}}},
            {"trace", to_json(failure.trace)}};
}

inline nlohmann::json to_json(const CertResult<CertBound>& result, const std::string& method, BoundMode mode) {
    return std::visit([&](const auto& r) { return to_json(r, method, mode); }, result);
}

}  // namespace rkstab::energy
