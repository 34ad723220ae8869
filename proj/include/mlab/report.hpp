#ifndef MLAB_REPORT_HPP
#define MLAB_REPORT_HPP

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace mlab {

/// Deterministic serialization: object keys sorted (nlohmann's default map
/// order) and every finite number printed with 17 significant digits, so the
/// same report always produces byte-identical output.
std::string emit_json(const nlohmann::json& doc);

/// CSV with a header row naming the columns; numbers at 17 significant digits.
std::string emit_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

} // namespace mlab

#endif
