#include <cmath>
#include <string>

#include "json.hpp"
#include "ltv/sysmodel.hpp"

namespace ltv {

namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) throw SpecError(key, "missing field");
    return *it;
}

double read_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw SpecError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw SpecError(path, "non-finite value");
    return x;
}

int read_count(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw SpecError(path, "expected an integer");
    const auto x = v.get<long long>();
    if (x < 1 || x > 100'000'000) throw SpecError(path, "out of range");
    return static_cast<int>(x);
}

Matrix read_matrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) throw SpecError(path, "expected a non-empty array of rows");
    const auto rows = v.size();
    std::size_t cols = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& row = v[r];
        const std::string rpath = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || row.empty()) throw SpecError(rpath, "expected a non-empty row");
        if (r == 0) cols = row.size();
        if (row.size() != cols) throw SpecError(rpath, "ragged matrix rows");
    }
    Matrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                read_number(v[r][c], path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    return M;
}

std::vector<Matrix> read_matrix_list(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) throw SpecError(path, "expected a non-empty array of matrices");
    std::vector<Matrix> out;
    out.reserve(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(read_matrix(v[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

CoeffMatrixFn read_coeff(const json& doc, const char* name, const TimeGrid& grid, int rows, int cols) {
    const json& c = require(doc, name);
    const std::string base(name);
    if (!c.is_object()) throw SpecError(base, "expected an object with \"kind\" and \"data\"");
    auto kind_it = c.find("kind");
    if (kind_it == c.end() || !kind_it->is_string()) throw SpecError(base + ".kind", "missing or not a string");
    auto data_it = c.find("data");
    if (data_it == c.end()) throw SpecError(base + ".data", "missing field");
    const std::string kind = kind_it->get<std::string>();
    const std::string dpath = base + ".data";

    CoeffMatrixFn f = [&] {
        try {
            if (kind == "constant") return CoeffMatrixFn::constant(read_matrix(*data_it, dpath), grid.tau());
            if (kind == "poly") return CoeffMatrixFn::polynomial(read_matrix_list(*data_it, dpath), grid.tau());
            if (kind == "samples") return CoeffMatrixFn::samples(grid, read_matrix_list(*data_it, dpath));
        } catch (const SpecError& e) {
            // Errors from reading nested arrays already carry the full path.
            if (e.field().rfind(base, 0) == 0) throw;
            throw SpecError(e.field().empty() ? base : base + "." + e.field(), e.message());
        }
        throw SpecError(base + ".kind", "unknown kind \"" + kind + "\" (expected constant, poly or samples)");
    }();

    if (f.rows() != rows || f.cols() != cols)
        throw SpecError(base, "expected shape " + std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                                  std::to_string(f.rows()) + "x" + std::to_string(f.cols()));
    return f;
}

const char* kind_name(CoeffMatrixFn::Kind kind) {
    switch (kind) {
        case CoeffMatrixFn::Kind::Constant: return "constant";
        case CoeffMatrixFn::Kind::Polynomial: return "poly";
        case CoeffMatrixFn::Kind::Samples: return "samples";
    }
    return "";
}

json matrix_json(const Matrix& M) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json coeff_json(const CoeffMatrixFn& f) {
    json data;
    if (f.kind() == CoeffMatrixFn::Kind::Constant) {
        data = matrix_json(f.data().front());
    } else {
        data = json::array();
        for (const auto& M : f.data()) data.push_back(matrix_json(M));
    }
    return json{{"kind", kind_name(f.kind())}, {"data", std::move(data)}};
}

}  // namespace

LtvSystem parse_system(std::string_view spec_text) {
    json doc;
    try {
        doc = json::parse(spec_text.begin(), spec_text.end());
    } catch (const json::exception& e) {
        throw SpecError("", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SpecError("", "system spec must be a JSON object");

    const int    n     = read_count(require(doc, "n"), "n");
    const int    m     = read_count(require(doc, "m"), "m");
    const int    p     = read_count(require(doc, "p"), "p");
    const double tau   = read_number(require(doc, "tau"), "tau");
    const int    steps = read_count(require(doc, "steps"), "steps");
    if (!(tau > 0.0)) throw SpecError("tau", "horizon must be > 0");
    if (n > kMaxStateDim) throw SpecError("n", "state dimension exceeds " + std::to_string(kMaxStateDim));

    TimeGrid grid = [&] {
        auto it = doc.find("nodes");
        if (it == doc.end()) return TimeGrid::uniform(tau, steps);
        if (!it->is_array()) throw SpecError("nodes", "expected an array");
        if (static_cast<int>(it->size()) != steps + 1)
            throw SpecError("nodes", "expected steps + 1 = " + std::to_string(steps + 1) + " entries");
        std::vector<double> nodes;
        for (std::size_t i = 0; i < it->size(); ++i)
            nodes.push_back(read_number((*it)[i], "nodes[" + std::to_string(i) + "]"));
        if (nodes.back() != tau) throw SpecError("nodes", "last node must equal tau");
        return TimeGrid::from_nodes(std::move(nodes));
    }();

    auto A = read_coeff(doc, "A", grid, n, n);
    auto B = read_coeff(doc, "B", grid, n, m);
    auto C = read_coeff(doc, "C", grid, p, n);
    return LtvSystem(std::move(A), std::move(B), std::move(C), std::move(grid));
}

std::string serialize_system(const LtvSystem& sys) {
    json doc = {{"n", sys.n()},
                {"m", sys.m()},
                {"p", sys.p()},
                {"tau", sys.tau()},
                {"steps", sys.grid().steps()},
                {"A", coeff_json(sys.coeff_a())},
                {"B", coeff_json(sys.coeff_b())},
                {"C", coeff_json(sys.coeff_c())}};
    if (!sys.grid().is_uniform()) doc["nodes"] = sys.grid().nodes();
    return doc.dump(2);
}

}  // namespace ltv
