#pragma once

#include <map>
#include <string>
#include <vector>

namespace spvcap {

/// NUTS region code. The level is implied by the code length: a level-n code
/// has 2+n characters ("UK" is level 0, "UKH12" is level 3), and a level-3
/// code's 4-character prefix is its parent level-2 code.
class RegionCode {
public:
    explicit RegionCode(std::string code);

    const std::string& code() const { return code_; }
    int level() const { return static_cast<int>(code_.size()) - 2; }

    /// Parent code one level up. Throws for level-0 codes.
    RegionCode parent() const;

    bool operator==(const RegionCode& other) const { return code_ == other.code_; }
    auto operator<=>(const RegionCode& other) const { return code_ <=> other.code_; }

private:
    std::string code_;
};

/// Assigns each level-3 region its parent level-2 value unchanged (used for
/// climate variables published at level 2 only). Throws if any level-3 code
/// has no parent entry, listing the orphans.
std::map<RegionCode, double> broadcast_nuts2_to_nuts3(const std::map<RegionCode, double>& values,
                                                      const std::vector<RegionCode>& registry);

}  // namespace spvcap
