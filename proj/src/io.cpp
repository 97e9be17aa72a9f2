#include "siga/io.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace siga::io {

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'I', 'G', 'A', 'C', 'N', 'T', '1'};

template <typename T>
void put(std::ostream& out, T value)
{
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& path)
{
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw std::runtime_error("truncated container " + path);
    }
    return value;
}

CMatrix as_column(const RVector& v) { return v.cast<Complex>(); }

RVector real_column(const CMatrix& m, const std::string& name)
{
    if (m.cols() != 1) {
        throw DimensionError(name + " must be a column vector");
    }
    if (m.size() > 0 && m.imag().cwiseAbs().maxCoeff() != 0.0) {
        throw std::invalid_argument(name + " must be real");
    }
    return m.col(0).real();
}

const CMatrix& entry(const Container& c, const std::string& name, const std::string& path)
{
    const auto it = c.find(name);
    if (it == c.end()) {
        throw std::runtime_error("model file " + path + " has no entry '" + name + "'");
    }
    return it->second;
}

}  // namespace

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_container(const std::string& path, const Container& entries)
{
    std::ostringstream out(std::ios::binary);
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(entries.size()));
    for (const auto& [name, m] : entries) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
        put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
        for (Index i = 0; i < m.rows(); ++i) {
            for (Index j = 0; j < m.cols(); ++j) {
                put<double>(out, m(i, j).real());
                put<double>(out, m(i, j).imag());
            }
        }
    }
    write_file_atomic(path, out.str());
}

Container read_container(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open container " + path);
    }
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || !std::equal(magic, magic + 8, kMagic)) {
        throw std::runtime_error(path + " is not a SIGACNT1 container");
    }
    const auto count = get<std::uint32_t>(in, path);
    Container c;
    for (std::uint32_t e = 0; e < count; ++e) {
        const auto len = get<std::uint32_t>(in, path);
        if (len > 4096) {
            throw std::runtime_error("implausible entry name length in " + path);
        }
        std::string name(len, '\0');
        if (!in.read(name.data(), len)) {
            throw std::runtime_error("truncated container " + path);
        }
        const auto rows = get<std::uint64_t>(in, path);
        const auto cols = get<std::uint64_t>(in, path);
        if (rows > (1ULL << 31) || cols > (1ULL << 31)) {
            throw std::runtime_error("implausible shape in " + path);
        }
        CMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
        for (Index i = 0; i < m.rows(); ++i) {
            for (Index j = 0; j < m.cols(); ++j) {
                const double re = get<double>(in, path);
                const double im = get<double>(in, path);
                m(i, j) = {re, im};
            }
        }
        c.emplace(std::move(name), std::move(m));
    }
    return c;
}

void write_csv_matrix(const std::string& path, const CMatrix& m)
{
    std::ostringstream out;
    out << "# " << m.rows() << ' ' << m.cols() << '\n';
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_double(m(i, j).real()) << ',' << format_double(m(i, j).imag());
        }
        out << '\n';
    }
    write_file_atomic(path, out.str());
}

CMatrix read_csv_matrix(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind('#', 0) != 0) {
        throw std::runtime_error(path + ": missing '# rows cols' header");
    }
    std::istringstream hs(line.substr(1));
    Index rows = 0;
    Index cols = 0;
    if (!(hs >> rows >> cols) || rows < 0 || cols < 0) {
        throw std::runtime_error(path + ": malformed header");
    }
    CMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) {
            throw std::runtime_error(path + ": expected " + std::to_string(rows) + " rows");
        }
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(ls, cell, ',')) {
            values.push_back(std::stod(cell));
        }
        if (static_cast<Index>(values.size()) != 2 * cols) {
            throw std::runtime_error(path + ": row " + std::to_string(i) + " has the wrong number of fields");
        }
        for (Index j = 0; j < cols; ++j) {
            m(i, j) = {values[static_cast<std::size_t>(2 * j)], values[static_cast<std::size_t>(2 * j + 1)]};
        }
    }
    return m;
}

void save_model(const std::string& path, const GaussianLinearModel& model)
{
    CMatrix s2(1, 1);
    s2(0, 0) = model.sigma_z2;
    if (std::filesystem::is_directory(path)) {
        const std::filesystem::path dir(path);
        write_csv_matrix((dir / "A.csv").string(), model.A);
        write_csv_matrix((dir / "D.csv").string(), as_column(model.D));
        write_csv_matrix((dir / "y.csv").string(), model.y);
        write_csv_matrix((dir / "sigma_z2.csv").string(), s2);
        return;
    }
    write_container(path, Container{{"A", model.A}, {"D", as_column(model.D)}, {"y", model.y}, {"sigma_z2", s2}});
}

GaussianLinearModel load_model(const std::string& path)
{
    Container c;
    if (std::filesystem::is_directory(path)) {
        const std::filesystem::path dir(path);
        for (const char* name : {"A", "D", "y", "sigma_z2"}) {
            c[name] = read_csv_matrix((dir / (std::string(name) + ".csv")).string());
        }
    } else {
        c = read_container(path);
    }
    GaussianLinearModel model;
    model.A = entry(c, "A", path);
    model.D = real_column(entry(c, "D", path), "D");
    const CMatrix& y = entry(c, "y", path);
    if (y.cols() != 1) {
        throw DimensionError("y must be a column vector");
    }
    model.y = y.col(0);
    const CMatrix& s2 = entry(c, "sigma_z2", path);
    if (s2.size() != 1) {
        throw DimensionError("sigma_z2 must be a scalar");
    }
    model.sigma_z2 = s2(0, 0).real();
    return model;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& trajectory)
{
    out << "t,nu_norm2,theta_norm2,dnu_inf,dtheta_inf\n";
    for (const TrajectoryRecord& r : trajectory) {
        out << r.t << ',' << format_double(r.nu_norm2) << ',' << format_double(r.theta_norm2) << ','
            << format_double(r.dnu_inf) << ',' << format_double(r.dtheta_inf) << '\n';
    }
}

nlohmann::json complex_to_json(const CVector& v)
{
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) {
        re.push_back(v(i).real());
        im.push_back(v(i).imag());
    }
    return {{"re", re}, {"im", im}};
}

nlohmann::json real_to_json(const RVector& v)
{
    nlohmann::json out = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) {
        out.push_back(v(i));
    }
    return out;
}

nlohmann::json to_json(const SigaResult& r)
{
    nlohmann::json j;
    j["status"] = std::string(to_string(r.status));
    j["iterations"] = r.iterations;
    j["residual_nu"] = r.residual_nu;
    j["residual_theta"] = r.residual_theta;
    j["nu_star"] = real_to_json(r.nu_star);
    j["theta_star"] = complex_to_json(r.theta_star);
    j["nu0"] = real_to_json(r.nu0);
    j["theta0"] = complex_to_json(r.theta0);
    j["mu0"] = complex_to_json(r.mu0);
    j["sigma0_diag"] = real_to_json(r.sigma0_diag);
    return j;
}

nlohmann::json to_json(const ConvergenceCertificate& c)
{
    nlohmann::json j;
    j["d"] = c.d;
    j["rho_shift"] = c.rho_shift;
    j["bound_general"] = c.bound_general;
    j["bound_worst"] = c.bound_worst;
    j["rho_Btilde"] = c.rho_Btilde;
    j["certified"] = c.certified;
    j["eig_Bstar"] = real_to_json(c.eig_Bstar);
    j["eig_Btilde"] = real_to_json(c.eig_Btilde);
    j["lemma_checks"] = c.lemma_checks;
    j["lambda_margin"] = c.lambda_margin;
    j["fixed_point"] = {
        {"nu_star", real_to_json(c.fixed_point.nu_star)},
        {"Lambda_star", real_to_json(c.fixed_point.Lambda_star)},
        {"beta_star", c.fixed_point.beta_star},
        {"residual_g", c.fixed_point.residual_g},
        {"residual_eq21", c.fixed_point.residual_eq21},
        {"iterations", c.fixed_point.iterations},
    };
    j["tolerances"] = {{"certification", c.certification_tol}};
    return j;
}

nlohmann::json to_json(const PosteriorExact& post)
{
    nlohmann::json j;
    j["mu"] = complex_to_json(post.mu);
    j["sigma_diag"] = real_to_json(post.Sigma.diagonal().real());
    j["mean_form_gap"] = post.mean_form_gap;
    return j;
}

void write_file_atomic(const std::string& path, const std::string& contents)
{
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << contents;
        if (!out.flush()) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, target);
}

namespace {

void dump_into(std::string& out, const nlohmann::json& v, int indent, int depth)
{
    const auto newline = [&](int level) {
        if (indent >= 0) {
            out += '\n';
            out.append(static_cast<std::size_t>(indent * level), ' ');
        }
    };
    const char* sep = indent >= 0 ? ": " : ":";
    switch (v.type()) {
    case nlohmann::json::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) {
                out += ',';
            }
            first = false;
            newline(depth + 1);
            out += nlohmann::json(it.key()).dump();
            out += sep;
            dump_into(out, it.value(), indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case nlohmann::json::value_t::array: {
        if (v.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            newline(depth + 1);
            dump_into(out, v[i], indent, depth + 1);
        }
        newline(depth);
        out += ']';
        return;
    }
    case nlohmann::json::value_t::number_float: {
        const double x = v.get<double>();
        out += std::isfinite(x) ? format_double(x) : std::string("null");
        return;
    }
    default:
        out += v.dump();
        return;
    }
}

}  // namespace

std::string dump_json(const nlohmann::json& value, int indent)
{
    std::string out;
    dump_into(out, value, indent, 0);
    return out;
}

}  // namespace siga::io
