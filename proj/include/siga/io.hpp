#pragma once

#include "siga/convergence.hpp"
#include "siga/linmodel.hpp"
#include "siga/siga.hpp"
#include "siga/types.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <string>

namespace siga::io {

/// Named complex arrays stored in one binary container:
///   magic "SIGACNT1", uint32 entry count, then per entry
///   uint32 name length, name bytes, uint64 rows, uint64 cols,
///   rows * cols (re, im) float64 pairs in row-major order.
/// All integers and doubles are little-endian.
using Container = std::map<std::string, CMatrix>;

void write_container(const std::string& path, const Container& entries);
Container read_container(const std::string& path);

/// CSV matrix: a "# rows cols" header line, then one line per row holding re,im pairs.
void write_csv_matrix(const std::string& path, const CMatrix& m);
CMatrix read_csv_matrix(const std::string& path);

/// A model is stored as entries "A" (N x M), "D" (M x 1), "y" (N x 1) and "sigma_z2" (1 x 1).
/// If `path` is a directory the CSV form A.csv, D.csv, y.csv, sigma_z2.csv is used instead.
void save_model(const std::string& path, const GaussianLinearModel& model);
GaussianLinearModel load_model(const std::string& path);

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& trajectory);

nlohmann::json to_json(const SigaResult& result);
nlohmann::json to_json(const ConvergenceCertificate& cert);
nlohmann::json to_json(const PosteriorExact& post);
nlohmann::json complex_to_json(const CVector& v);
nlohmann::json real_to_json(const RVector& v);

/// Writes `contents` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& contents);

/// Formats a double with 17 significant digits.
std::string format_double(double x);

/// Serializes JSON like nlohmann::json::dump, except that floating-point numbers are written with
/// 17 significant digits. Non-finite numbers become null.
std::string dump_json(const nlohmann::json& value, int indent = 2);

}  // namespace siga::io
