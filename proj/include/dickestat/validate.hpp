#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

namespace dickestat::oracle {

struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

/// max |[Sx, Sy] - i Sz| over the given atom counts, built and multiplied in Scalar.
template <class Scalar>
double spin_commutator_error(std::initializer_list<int> atom_counts = {1, 2, 21, 200});

/// End-to-end oracle checks behind `dickestat validate`.
std::vector<Check> run_validation(std::uint64_t seed);

nlohmann::ordered_json validation_report(const std::vector<Check>& checks, std::uint64_t seed);

}  // namespace dickestat::oracle
