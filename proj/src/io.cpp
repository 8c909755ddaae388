#include "lipfree/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lipfree {

using nlohmann::json;

std::string format_double(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StructuralError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw StructuralError(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StructuralError("cannot write " + path);
    out << text;
}

LoadedSpace space_from_json(const json& j) {
    try {
        const double p = j.at("p").get<double>();
        auto dist = j.at("dist").get<std::vector<std::vector<double>>>();
        const std::size_t n = dist.size();
        std::vector<std::string> labels;
        if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
        if (!labels.empty() && labels.size() != n) throw StructuralError("labels and dist differ in size");
        const std::size_t base = j.value("base", std::size_t{0});
        if (n > 0 && base >= n) throw StructuralError("base index out of range");

        std::vector<std::size_t> order{base};
        for (std::size_t i = 0; i < n; ++i)
            if (i != base) order.push_back(i);
        if (n == 0) order.clear();
        std::vector<std::vector<double>> canon(n);
        std::vector<std::string> canon_labels;
        for (std::size_t a = 0; a < n; ++a) {
            if (dist[order[a]].size() != n) throw StructuralError("dist must be square");
            canon[a].resize(n);
            for (std::size_t b = 0; b < n; ++b) canon[a][b] = dist[order[a]][order[b]];
            if (!labels.empty()) canon_labels.push_back(labels[order[a]]);
        }
        return {PMetricSpace(std::move(canon_labels), std::move(canon), p), std::move(order)};
    } catch (const json::exception& e) {
        throw StructuralError(std::string("space file: ") + e.what());
    }
}

LoadedSpace read_space_file(const std::string& path) { return space_from_json(read_json_file(path)); }

std::string space_to_json_text(const PMetricSpace& space) {
    std::ostringstream out;
    out << "{\n  \"p\": " << format_double(space.p()) << ",\n  \"labels\": [";
    for (std::size_t i = 0; i < space.size(); ++i) out << (i ? ", " : "") << json(space.labels()[i]).dump();
    out << "],\n  \"base\": 0,\n  \"dist\": [\n";
    for (std::size_t i = 0; i < space.size(); ++i) {
        out << "    [";
        for (std::size_t k = 0; k < space.size(); ++k) out << (k ? ", " : "") << format_double(space.d(i, k));
        out << "]" << (i + 1 < space.size() ? "," : "") << "\n";
    }
    out << "  ]\n}\n";
    return out.str();
}

void write_space_file(const std::string& path, const PMetricSpace& space) {
    write_text_file(path, space_to_json_text(space));
}

Molecule molecule_from_json(const json& j, const std::string& base_dir) {
    try {
        const json& s = j.at("space");
        LoadedSpace loaded = [&] {
            if (s.is_string()) {
                std::filesystem::path path(s.get<std::string>());
                if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
                return read_space_file(path.string());
            }
            return space_from_json(s);
        }();
        const auto raw = j.at("coeffs").get<std::vector<double>>();
        const std::size_t n = loaded.space.size();
        auto space = std::make_shared<const PMetricSpace>(std::move(loaded.space));
        if (raw.size() == n) {
            std::vector<double> coeffs(n);
            for (std::size_t a = 0; a < n; ++a) coeffs[a] = raw[loaded.order[a]];
            return Molecule(space, std::move(coeffs));
        }
        if (raw.size() + 1 == n) {
            // One entry per non-base point in file order.
            const std::size_t base = loaded.order.front();
            std::vector<double> delta(n - 1);
            for (std::size_t a = 1; a < n; ++a) {
                const std::size_t old = loaded.order[a];
                delta[a - 1] = raw[old < base ? old : old - 1];
            }
            return Molecule::from_delta(space, delta);
        }
        throw StructuralError("coeffs must have n or n-1 entries");
    } catch (const json::exception& e) {
        throw StructuralError(std::string("molecule file: ") + e.what());
    }
}

Molecule read_molecule_file(const std::string& path) {
    return molecule_from_json(read_json_file(path), std::filesystem::path(path).parent_path().string());
}

json certificate_to_json(const NormCertificate& cert) {
    json j;
    auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    j["value"] = num(cert.value);
    j["upper"] = num(cert.upper);
    j["lower"] = num(cert.lower);
    json primal = json::array();
    for (const auto& t : cert.primal) primal.push_back({{"x", t.x}, {"y", t.y}, {"lambda", num(t.lambda)}});
    j["primal"] = primal;
    json dual = json::array();
    for (double v : cert.dual.values()) dual.push_back(num(v));
    j["dual"] = dual;
    j["method"] = to_string(cert.method);
    j["exact"] = cert.exact;
    return j;
}

}  // namespace lipfree
