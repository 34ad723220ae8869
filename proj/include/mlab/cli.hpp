#ifndef MLAB_CLI_HPP
#define MLAB_CLI_HPP

#include "mlab/stabilizer.hpp"
#include "mlab/svaction.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace mlab {

/// Operator description parsed from a spec document: either a Kirillov
/// normal-form family or explicit Fourier data, optionally pre-transformed by
/// a group element.
struct ParsedSpec {
    SchrodingerOp D;
    bool is_kirillov = false;
    KirillovFamily family;
    std::optional<TrigPoly> family_xi; // the closed-form field, when present
};

ParsedSpec parse_operator_spec(const nlohmann::json& doc);

/// Entry point used by both the binary and the tests; output (JSON or CSV)
/// is appended to `out`.  Returns the process exit code: 0 success,
/// 1 malformed spec, 2 numerical failure (error name inside the report).
int cli_main(const std::vector<std::string>& args, std::string& out);

int cli_run(int argc, char** argv);

} // namespace mlab

#endif
