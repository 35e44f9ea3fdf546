#include "aplsm/io.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace aplsm {

using nlohmann::json;

ParseError::ParseError(std::string path, int line, const std::string& message)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + message),
      path_(std::move(path)),
      line_(line) {}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

bool is_na(const std::string& s) {
  return s == "NA" || s == "na" || s == "NaN" || s == "nan";
}

bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path, 0, "cannot open file");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool looks_like_header(const std::vector<std::string>& fields) {
  for (const auto& f : fields) {
    double v;
    if (!is_na(f) && !parse_double(f, &v)) return true;
  }
  return false;
}

std::int8_t parse_binary_cell(const std::string& token, const std::string& path,
                              int line) {
  if (is_na(token)) return kMissing;
  double v;
  if (!parse_double(token, &v) || (v != 0.0 && v != 1.0)) {
    throw ParseError(path, line, "entry '" + token + "' is not 0, 1 or NA");
  }
  return static_cast<std::int8_t>(v);
}

BinaryMatrix parse_binary_rows(const std::vector<std::string>& lines,
                               std::size_t first_row, std::size_t n_cols,
                               const std::string& path) {
  std::vector<std::vector<std::int8_t>> rows;
  for (std::size_t li = first_row; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto fields = split_csv(lines[li]);
    if (fields.size() != n_cols) {
      throw ParseError(path, static_cast<int>(li + 1),
                       "expected " + std::to_string(n_cols) + " columns, got " +
                           std::to_string(fields.size()));
    }
    std::vector<std::int8_t> row;
    row.reserve(n_cols);
    for (const auto& f : fields) {
      row.push_back(parse_binary_cell(f, path, static_cast<int>(li + 1)));
    }
    rows.push_back(std::move(row));
  }
  BinaryMatrix m(rows.size(), n_cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < n_cols; ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace

SocialNetwork read_social_network(const std::string& path, NetworkFormat format,
                                  bool directed) {
  const auto lines = read_lines(path);

  if (format == NetworkFormat::edge_list) {
    if (lines.empty()) throw ParseError(path, 1, "empty edge list");
    const std::string first = trim(lines[0]);
    if (first.rfind("nodes=", 0) != 0) {
      throw ParseError(path, 1, "edge list must start with 'nodes=N'");
    }
    int n = 0;
    try {
      n = std::stoi(first.substr(6));
    } catch (...) {
      throw ParseError(path, 1, "invalid node count in '" + first + "'");
    }
    if (n < 1) throw ParseError(path, 1, "node count must be >= 1");
    BinaryMatrix m = BinaryMatrix::Zero(n, n);
    for (std::size_t li = 1; li < lines.size(); ++li) {
      const std::string line = trim(lines[li]);
      if (line.empty()) continue;
      const auto fields = split_csv(line);
      double di, dj;
      if (fields.size() != 2 || !parse_double(fields[0], &di) ||
          !parse_double(fields[1], &dj)) {
        throw ParseError(path, static_cast<int>(li + 1),
                         "expected 'i,j' edge, got '" + line + "'");
      }
      const int i = static_cast<int>(di), j = static_cast<int>(dj);
      if (i < 1 || i > n || j < 1 || j > n) {
        throw ParseError(path, static_cast<int>(li + 1),
                         "edge index out of range [1, " + std::to_string(n) +
                             "]");
      }
      if (i == j) continue;  // self loops are ignored
      m(i - 1, j - 1) = 1;
      if (!directed) m(j - 1, i - 1) = 1;
    }
    return SocialNetwork(std::move(m), directed);
  }

  // dense_csv
  std::size_t first_row = 0;
  std::size_t n_cols = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto fields = split_csv(lines[li]);
    if (looks_like_header(fields)) {
      first_row = li + 1;
      n_cols = fields.size();
    } else {
      if (n_cols == 0) {
        first_row = li;
        n_cols = fields.size();
      }
    }
    break;
  }
  if (n_cols == 0) throw ParseError(path, 1, "empty adjacency file");
  BinaryMatrix m = parse_binary_rows(lines, first_row, n_cols, path);
  if (m.rows() != m.cols()) {
    throw ParseError(path, static_cast<int>(first_row + m.rows()),
                     "adjacency matrix must be square (got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ")");
  }
  if (!directed) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = i + 1; j < m.cols(); ++j)
        if (m(i, j) != m(j, i)) {
          throw ParseError(path, static_cast<int>(first_row + i + 1),
                           "undirected network is asymmetric at (" +
                               std::to_string(i + 1) + "," +
                               std::to_string(j + 1) + ")");
        }
  }
  return SocialNetwork(std::move(m), directed);
}

AttributeMatrix read_attribute_matrix(const std::string& path) {
  const auto lines = read_lines(path);
  std::size_t li = 0;
  while (li < lines.size() && trim(lines[li]).empty()) ++li;
  if (li >= lines.size()) throw ParseError(path, 1, "empty attribute file");
  const auto header = split_csv(lines[li]);
  if (!looks_like_header(header)) {
    throw ParseError(path, static_cast<int>(li + 1),
                     "attribute file must start with a header of names");
  }
  BinaryMatrix m = parse_binary_rows(lines, li + 1, header.size(), path);
  return AttributeMatrix(std::move(m), header);
}

Matrix read_dense_matrix(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<std::vector<double>> rows;
  std::size_t n_cols = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto fields = split_csv(lines[li]);
    if (rows.empty() && n_cols == 0 && looks_like_header(fields)) continue;
    if (n_cols == 0) n_cols = fields.size();
    if (fields.size() != n_cols) {
      throw ParseError(path, static_cast<int>(li + 1), "ragged row");
    }
    std::vector<double> row;
    for (const auto& f : fields) {
      if (is_na(f)) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      double v;
      if (!parse_double(f, &v)) {
        throw ParseError(path, static_cast<int>(li + 1),
                         "invalid number '" + f + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  Matrix m(rows.size(), n_cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < n_cols; ++j) m(i, j) = rows[i][j];
  return m;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write to " + path);
  return out;
}

void write_header(std::ofstream& out, const std::vector<std::string>& header) {
  for (std::size_t j = 0; j < header.size(); ++j) {
    out << (j ? "," : "") << header[j];
  }
  out << "\n";
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, int expected_cols = -1) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::Index cols = expected_cols;
  if (cols < 0) cols = n > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Matrix m(n, cols);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rows[i][j].get<double>();
  return m;
}

}  // namespace

void write_matrix_csv(const Matrix& m, const std::string& path,
                      const std::vector<std::string>& header) {
  auto out = open_out(path);
  if (!header.empty()) write_header(out, header);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? "," : "") << format_double(m(i, j));
    }
    out << "\n";
  }
}

void write_binary_csv(const BinaryMatrix& m, const std::string& path,
                      const std::vector<std::string>& header) {
  auto out = open_out(path);
  if (!header.empty()) write_header(out, header);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? "," : "");
      if (m(i, j) == kMissing) {
        out << "NA";
      } else {
        out << static_cast<int>(m(i, j));
      }
    }
    out << "\n";
  }
}

void write_fit_json(const FitResult& result, const LatentConfig& config,
                    const FitOptions& options,
                    const std::vector<std::string>& attribute_names,
                    const std::string& path) {
  json doc;
  doc["schema_version"] = kFitSchemaVersion;
  doc["model"] = to_string(result.model_kind);
  doc["config"] = {{"dim", config.dim},
                   {"prior_var_person", config.prior_var_person},
                   {"prior_var_attribute", config.prior_var_attribute}};
  doc["options"] = {{"max_iterations", options.max_iterations},
                    {"convergence_ratio", options.convergence_ratio},
                    {"abs_tolerance", options.abs_tolerance},
                    {"ridge", options.ridge},
                    {"seed", options.seed},
                    {"init_scale", options.init_scale}};
  doc["attribute_names"] = attribute_names;
  doc["state"] = {{"alpha0", result.state.alpha0},
                  {"alpha1", result.state.alpha1},
                  {"mean_persons", matrix_to_json(result.state.mean_persons)},
                  {"mean_attributes", matrix_to_json(result.state.mean_attributes)},
                  {"cov_persons", matrix_to_json(result.state.cov_persons)},
                  {"cov_attributes", matrix_to_json(result.state.cov_attributes)}};
  doc["objective_trace"] = result.objective_trace;
  doc["iterations_run"] = result.iterations_run;
  doc["converged"] = result.converged;
  doc["diagnostics"] = {
      {"damped_sweeps", result.diagnostics.damped_sweeps},
      {"gradient_fallbacks", result.diagnostics.gradient_fallbacks},
      {"intercept_skips", result.diagnostics.intercept_skips}};
  auto out = open_out(path);
  out << doc.dump(2) << "\n";
}

LoadedFit read_fit_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(path, 0, std::string("invalid JSON: ") + e.what());
  }

  const std::string version = doc.at("schema_version").get<std::string>();
  const std::string major = version.substr(0, version.find('.'));
  const std::string expected(kFitSchemaVersion);
  if (major != expected.substr(0, expected.find('.'))) {
    throw ParseError(path, 0, "unsupported fit schema version " + version);
  }

  LoadedFit loaded;
  loaded.result.model_kind =
      model_kind_from_string(doc.at("model").get<std::string>());
  const auto& jc = doc.at("config");
  loaded.config.dim = jc.at("dim").get<int>();
  loaded.config.prior_var_person = jc.at("prior_var_person").get<double>();
  loaded.config.prior_var_attribute = jc.at("prior_var_attribute").get<double>();
  const auto& jo = doc.at("options");
  loaded.options.max_iterations = jo.at("max_iterations").get<int>();
  loaded.options.convergence_ratio = jo.at("convergence_ratio").get<double>();
  loaded.options.abs_tolerance = jo.at("abs_tolerance").get<double>();
  loaded.options.ridge = jo.at("ridge").get<double>();
  loaded.options.seed = jo.at("seed").get<std::uint64_t>();
  loaded.options.init_scale = jo.at("init_scale").get<double>();
  loaded.attribute_names =
      doc.at("attribute_names").get<std::vector<std::string>>();

  const auto& js = doc.at("state");
  VariationalState& state = loaded.result.state;
  state.alpha0 = js.at("alpha0").get<double>();
  state.alpha1 = js.at("alpha1").get<double>();
  state.mean_persons = matrix_from_json(js.at("mean_persons"));
  state.mean_attributes =
      matrix_from_json(js.at("mean_attributes"), loaded.config.dim);
  state.cov_persons = matrix_from_json(js.at("cov_persons"));
  state.cov_attributes = matrix_from_json(js.at("cov_attributes"));

  loaded.result.objective_trace =
      doc.at("objective_trace").get<std::vector<double>>();
  loaded.result.iterations_run = doc.at("iterations_run").get<int>();
  loaded.result.converged = doc.at("converged").get<bool>();
  const auto& jd = doc.at("diagnostics");
  loaded.result.diagnostics.damped_sweeps = jd.at("damped_sweeps").get<int>();
  loaded.result.diagnostics.gradient_fallbacks =
      jd.at("gradient_fallbacks").get<int>();
  loaded.result.diagnostics.intercept_skips =
      jd.at("intercept_skips").get<int>();
  return loaded;
}

void write_replication_csv(const ReplicationResult& result,
                           const std::string& path) {
  auto out = open_out(path);
  out << "replicate,valid,aae_social_aplsm,aae_social_lsm,aae_attr_aplsm,"
         "aae_attr_blsm,alpha0_error,alpha1_error,"
         "ratio_person_p25,ratio_person_p50,ratio_person_p75,"
         "ratio_attr_p25,ratio_attr_p50,ratio_attr_p75,"
         "all_converged,max_trace_dip\n";
  for (const auto& row : result.rows) {
    out << row.replicate_index << "," << (row.valid ? 1 : 0);
    if (row.valid) {
      out << "," << format_double(row.aae_social_aplsm) << ","
          << format_double(row.aae_social_lsm) << ","
          << format_double(row.aae_attr_aplsm) << ","
          << format_double(row.aae_attr_blsm) << ","
          << format_double(row.alpha0_error) << ","
          << format_double(row.alpha1_error);
      for (double q : row.ratio_person_quantiles) out << "," << format_double(q);
      for (double q : row.ratio_attr_quantiles) out << "," << format_double(q);
      out << "," << (row.all_converged ? 1 : 0) << ","
          << format_double(row.max_trace_dip);
    } else {
      for (int i = 0; i < 14; ++i) out << ",NA";
    }
    out << "\n";
  }
}

void write_aae_long_csv(const ReplicationResult& result,
                        const std::string& path) {
  auto out = open_out(path);
  out << "replicate,metric,value\n";
  for (const auto& row : result.rows) {
    if (!row.valid) continue;
    out << row.replicate_index << ",aae_social_aplsm,"
        << format_double(row.aae_social_aplsm) << "\n";
    out << row.replicate_index << ",aae_social_lsm,"
        << format_double(row.aae_social_lsm) << "\n";
    out << row.replicate_index << ",aae_attr_aplsm,"
        << format_double(row.aae_attr_aplsm) << "\n";
    out << row.replicate_index << ",aae_attr_blsm,"
        << format_double(row.aae_attr_blsm) << "\n";
  }
}

void write_alpha_errors_csv(const ReplicationResult& result,
                            const std::string& path) {
  auto out = open_out(path);
  out << "replicate,alpha0_error,alpha1_error\n";
  for (const auto& row : result.rows) {
    if (!row.valid) continue;
    out << row.replicate_index << "," << format_double(row.alpha0_error) << ","
        << format_double(row.alpha1_error) << "\n";
  }
}

void write_distance_ratio_csv(const ReplicationResult& result,
                              const std::string& path) {
  auto out = open_out(path);
  out << "replicate,side,p25,p50,p75\n";
  for (const auto& row : result.rows) {
    if (!row.valid) continue;
    out << row.replicate_index << ",person";
    for (double q : row.ratio_person_quantiles) out << "," << format_double(q);
    out << "\n" << row.replicate_index << ",attribute";
    for (double q : row.ratio_attr_quantiles) out << "," << format_double(q);
    out << "\n";
  }
}

void write_positions_csv(const VariationalState& state,
                         const std::vector<std::string>& attribute_names,
                         const std::string& path) {
  // 80% central interval per axis under the shared Gaussian covariance.
  constexpr double kZ90 = 1.2815515655446004;
  auto out = open_out(path);
  const int d = state.dim();
  out << "kind,index,name";
  for (int k = 0; k < d; ++k) out << ",x" << (k + 1);
  for (int k = 0; k < d; ++k) out << ",radius" << (k + 1);
  out << "\n";
  const auto write_rows = [&](const Matrix& means, const Matrix& cov,
                              const char* kind, bool named) {
    for (Eigen::Index i = 0; i < means.rows(); ++i) {
      out << kind << "," << (i + 1) << ",";
      if (named && i < static_cast<Eigen::Index>(attribute_names.size())) {
        out << attribute_names[i];
      }
      for (int k = 0; k < d; ++k) out << "," << format_double(means(i, k));
      for (int k = 0; k < d; ++k) {
        out << "," << format_double(kZ90 * std::sqrt(cov(k, k)));
      }
      out << "\n";
    }
  };
  write_rows(state.mean_persons, state.cov_persons, "person", false);
  write_rows(state.mean_attributes, state.cov_attributes, "attribute", true);
}

void write_rank_pairs_csv(const RankPairs& pairs, const std::string& label,
                          const std::string& path) {
  auto out = open_out(path);
  out << "# spearman=" << format_double(pairs.spearman)
      << " reference_intercept=" << format_double(pairs.reference_intercept)
      << " reference_slope=" << format_double(pairs.reference_slope) << "\n";
  out << "label,rank_x,rank_y\n";
  for (std::size_t i = 0; i < pairs.rank_x.size(); ++i) {
    out << label << "," << format_double(pairs.rank_x[i]) << ","
        << format_double(pairs.rank_y[i]) << "\n";
  }
}

void write_roc_csv(const RocCurve& curve, const std::string& path) {
  auto out = open_out(path);
  out << "# auc=" << format_double(curve.auc) << "\n";
  out << "threshold,fpr,tpr\n";
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    out << format_double(curve.thresholds[i]) << ","
        << format_double(curve.fpr[i]) << "," << format_double(curve.tpr[i])
        << "\n";
  }
}

void write_clusters_csv(const ClusterAssignment& assignment, int n_persons,
                        const std::vector<std::string>& attribute_names,
                        const std::string& path) {
  auto out = open_out(path);
  out << "kind,index,name,cluster\n";
  for (std::size_t p = 0; p < assignment.labels.size(); ++p) {
    const bool person = static_cast<int>(p) < n_persons;
    const int idx = person ? static_cast<int>(p) : static_cast<int>(p) - n_persons;
    out << (person ? "person" : "attribute") << "," << (idx + 1) << ",";
    if (!person && idx < static_cast<int>(attribute_names.size())) {
      out << attribute_names[idx];
    }
    out << "," << assignment.labels[p] << "\n";
  }
}

}  // namespace aplsm
