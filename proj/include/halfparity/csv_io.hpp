#pragma once

// CSV tables and the run manifest. Numbers are written with 17 significant
// digits, undefined values as `nan`; every table starts with a header row.

#include "halfparity/estimator.hpp"
#include "halfparity/sde_engine.hpp"
#include "halfparity/trajectory_analysis.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace halfparity {

/// Thrown on unreadable/unwritable files and malformed CSV input.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_number(double x);
double parse_number(std::string_view field);

inline constexpr std::string_view kTrajectoryHeader = "traj,t,I,J,C,Q,dQ,dQ_e,dQ_eo,p_uu,p_ud,p_du,p_dd,dW";
inline constexpr std::string_view kSummaryHeader = "t,class,mean_C,mean_Q,sem_C,sem_Q,count";
inline constexpr std::string_view kRateGridHeader =
    "t_i,delta_t,tau,eta,success_rate,error_rate,n_entangled,n_separable";

/// Rows of one trajectory (no header).
void write_trajectory_rows(std::ostream& out, const TrajectoryRecord& record);
/// Reads a concatenated or single-trajectory CSV back into records (samples only).
std::vector<TrajectoryRecord> read_trajectory_csv(std::istream& in);

struct SummaryRow {
  double t = 0.0;
  std::string cls;  // odd, even_plus, even_minus or all
  double mean_C = 0.0;
  double mean_Q = 0.0;
  double sem_C = 0.0;
  double sem_Q = 0.0;
  std::size_t count = 0;
};

/// Per time: the three classes (if classified) followed by `all`.
void write_summary(std::ostream& out, const EnsembleSummary& summary);
std::vector<SummaryRow> read_summary(std::istream& in);

void write_rate_grid(std::ostream& out, const RateGrid& grid);

struct RateRow {
  double t_i = 0.0;
  double delta_t = 0.0;
  double tau = 0.0;
  double eta = 1.0;
  double success_rate = 0.0;
  double error_rate = 0.0;
  std::size_t n_entangled = 0;
  std::size_t n_separable = 0;
};
std::vector<RateRow> read_rate_grid(std::istream& in);

/// Generic numeric table: a header line plus rows of numbers.
struct NumericTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
void write_table(std::ostream& out, const NumericTable& table);
NumericTable read_table(std::istream& in);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace halfparity
