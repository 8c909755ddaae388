#ifndef LIPFREE_IO_HPP
#define LIPFREE_IO_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "lipfree/freecore.hpp"
#include "lipfree/qmetric.hpp"

namespace lipfree {

/// %.17g; JSON null for non-finite values.
[[nodiscard]] std::string format_double(double x);

struct LoadedSpace {
    PMetricSpace space;
    /// order[i] = index in the file of canonical point i (the base moves to 0).
    std::vector<std::size_t> order;
};

/// {"p", "labels" (optional), "base" (optional, default 0), "dist"}.
[[nodiscard]] LoadedSpace space_from_json(const nlohmann::json& j);
[[nodiscard]] LoadedSpace read_space_file(const std::string& path);

/// Canonical text with 17 significant digits for every number.
[[nodiscard]] std::string space_to_json_text(const PMetricSpace& space);
void write_space_file(const std::string& path, const PMetricSpace& space);

/// {"space": path (relative to the molecule file) or inline object,
///  "coeffs": one value per point, or one per non-base point}.
[[nodiscard]] Molecule read_molecule_file(const std::string& path);
[[nodiscard]] Molecule molecule_from_json(const nlohmann::json& j, const std::string& base_dir);

/// {"value", "upper", "lower", "primal": [{"x","y","lambda"}], "dual", "method", "exact"}.
[[nodiscard]] nlohmann::json certificate_to_json(const NormCertificate& cert);

[[nodiscard]] nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace lipfree

#endif
