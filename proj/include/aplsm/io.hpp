#pragma once

#include "aplsm/clustering.hpp"
#include "aplsm/metrics.hpp"
#include "aplsm/simulation.hpp"
#include "aplsm/types.hpp"
#include "aplsm/vbem.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace aplsm {

enum class NetworkFormat { dense_csv, edge_list };

/// Structured parse failure with the offending file and 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, int line, const std::string& message);
  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  std::string path_;
  int line_;
};

/// dense_csv: optional header row, then N rows by N comma-separated 0/1/NA.
/// edge_list: a first line "nodes=N" followed by 1-based "i,j" pairs.
SocialNetwork read_social_network(const std::string& path, NetworkFormat format,
                                  bool directed = false);

/// Dense CSV with a mandatory header row of attribute names.
AttributeMatrix read_attribute_matrix(const std::string& path);

/// Dense CSV of doubles (NA -> NaN), optional header skipped.
Matrix read_dense_matrix(const std::string& path);

void write_matrix_csv(const Matrix& m, const std::string& path,
                      const std::vector<std::string>& header = {});
void write_binary_csv(const BinaryMatrix& m, const std::string& path,
                      const std::vector<std::string>& header = {});

/// fit.json is versioned; readers reject unknown major versions.
inline constexpr const char* kFitSchemaVersion = "1.0";

void write_fit_json(const FitResult& result, const LatentConfig& config,
                    const FitOptions& options,
                    const std::vector<std::string>& attribute_names,
                    const std::string& path);

struct LoadedFit {
  FitResult result;
  LatentConfig config;
  FitOptions options;
  std::vector<std::string> attribute_names;
};

LoadedFit read_fit_json(const std::string& path);

void write_replication_csv(const ReplicationResult& result,
                           const std::string& path);
/// Long-format AAE rows (replicate, metric, value) for boxplots.
void write_aae_long_csv(const ReplicationResult& result,
                        const std::string& path);
void write_alpha_errors_csv(const ReplicationResult& result,
                            const std::string& path);
void write_distance_ratio_csv(const ReplicationResult& result,
                              const std::string& path);

/// Positions with per-axis 80% credible radii from the shared covariance
/// diagonals (mean +/- z_0.9 sqrt(diag)).
void write_positions_csv(const VariationalState& state,
                         const std::vector<std::string>& attribute_names,
                         const std::string& path);

void write_rank_pairs_csv(const RankPairs& pairs, const std::string& label,
                          const std::string& path);
void write_roc_csv(const RocCurve& curve, const std::string& path);
void write_clusters_csv(const ClusterAssignment& assignment, int n_persons,
                        const std::vector<std::string>& attribute_names,
                        const std::string& path);

std::string format_double(double v);

}  // namespace aplsm
