#include "spvcap/region.hpp"

#include <stdexcept>

namespace spvcap {

RegionCode::RegionCode(std::string code) : code_(std::move(code)) {
    if (code_.size() < 2 || code_.size() > 5) {
        throw std::invalid_argument("region code '" + code_ +
                                    "' must have 2 to 5 characters (NUTS level 0 to 3)");
    }
}

RegionCode RegionCode::parent() const {
    if (level() == 0) throw std::invalid_argument("region code '" + code_ + "' has no parent");
    return RegionCode(code_.substr(0, code_.size() - 1));
}

std::map<RegionCode, double> broadcast_nuts2_to_nuts3(const std::map<RegionCode, double>& values,
                                                      const std::vector<RegionCode>& registry) {
    for (const auto& [code, value] : values) {
        if (code.level() != 2) {
            throw std::invalid_argument("broadcast source '" + code.code() + "' is not a level-2 code");
        }
    }
    std::map<RegionCode, double> out;
    std::string orphans;
    for (const auto& region : registry) {
        if (region.level() != 3) {
            throw std::invalid_argument("broadcast target '" + region.code() + "' is not a level-3 code");
        }
        const auto it = values.find(region.parent());
        if (it == values.end()) {
            if (!orphans.empty()) orphans += ", ";
            orphans += region.code();
            continue;
        }
        out.emplace(region, it->second);
    }
    if (!orphans.empty()) {
        throw std::runtime_error("broadcast: no parent value for region(s) " + orphans);
    }
    return out;
}

}  // namespace spvcap
