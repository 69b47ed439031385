#include "halfparity/csv_io.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>

namespace halfparity {

namespace {

std::vector<std::string_view> fields(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::size_t parse_count(std::string_view field) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
    throw IoError(fmt::format("malformed count '{}'", field));
  return out;
}

void expect_header(std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("missing CSV header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw IoError(fmt::format("unexpected CSV header '{}'", line));
}

template <class Fn>
void for_each_row(std::istream& in, std::size_t width, Fn fn) {
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = fields(line);
    if (f.size() != width) throw IoError(fmt::format("line {}: expected {} fields, got {}", line_no, width, f.size()));
    fn(f);
  }
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

double parse_number(std::string_view field) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (field == "inf") return std::numeric_limits<double>::infinity();
  if (field == "-inf") return -std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
    throw IoError(fmt::format("malformed number '{}'", field));
  return out;
}

void write_trajectory_rows(std::ostream& out, const TrajectoryRecord& record) {
  fmt::memory_buffer buf;
  for (const auto& s : record.samples) {
    const auto& p = s.populations;
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", record.index,
                   format_number(s.t), format_number(s.record), format_number(s.outcome),
                   format_number(s.concurrence), format_number(s.heat), format_number(s.heat_increment),
                   format_number(s.heat_even), format_number(s.heat_even_odd), format_number(p.uu),
                   format_number(p.ud), format_number(p.du), format_number(p.dd), format_number(s.wiener));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::vector<TrajectoryRecord> read_trajectory_csv(std::istream& in) {
  expect_header(in, kTrajectoryHeader);
  std::vector<TrajectoryRecord> out;
  for_each_row(in, 14, [&](const std::vector<std::string_view>& f) {
    const std::size_t index = parse_count(f[0]);
    if (out.empty() || out.back().index != index) {
      out.emplace_back();
      out.back().index = index;
    }
    TrajectorySample s;
    s.t = parse_number(f[1]);
    s.record = parse_number(f[2]);
    s.outcome = parse_number(f[3]);
    s.concurrence = parse_number(f[4]);
    s.heat = parse_number(f[5]);
    s.heat_increment = parse_number(f[6]);
    s.heat_even = parse_number(f[7]);
    s.heat_even_odd = parse_number(f[8]);
    s.populations = {parse_number(f[9]), parse_number(f[10]), parse_number(f[11]), parse_number(f[12])};
    s.wiener = parse_number(f[13]);
    out.back().samples.push_back(s);
  });
  for (auto& r : out)
    if (r.samples.size() > 1) r.dt = r.samples[1].t - r.samples[0].t;
  return out;
}

void write_summary(std::ostream& out, const EnsembleSummary& summary) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kSummaryHeader);
  auto row = [&](std::size_t k, std::string_view name, const ClassSeries& c) {
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{}\n", format_number(summary.times[k]), name,
                   format_number(c.mean_C[k]), format_number(c.mean_Q[k]), format_number(c.sem_C[k]),
                   format_number(c.sem_Q[k]), c.count);
  };
  for (std::size_t k = 0; k < summary.times.size(); ++k) {
    if (summary.classified)
      for (auto c : {OutcomeClass::Odd, OutcomeClass::EvenPlus, OutcomeClass::EvenMinus})
        row(k, to_string(c), summary.of(c));
    row(k, "all", summary.all);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::vector<SummaryRow> read_summary(std::istream& in) {
  expect_header(in, kSummaryHeader);
  std::vector<SummaryRow> out;
  for_each_row(in, 7, [&](const std::vector<std::string_view>& f) {
    SummaryRow r;
    r.t = parse_number(f[0]);
    r.cls = std::string(f[1]);
    if (r.cls != "all") (void)outcome_class_from_string(r.cls);
    r.mean_C = parse_number(f[2]);
    r.mean_Q = parse_number(f[3]);
    r.sem_C = parse_number(f[4]);
    r.sem_Q = parse_number(f[5]);
    r.count = parse_count(f[6]);
    out.push_back(std::move(r));
  });
  return out;
}

void write_rate_grid(std::ostream& out, const RateGrid& grid) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kRateGridHeader);
  for (const auto& c : grid.cells)
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},{}\n", format_number(c.t_i),
                   format_number(c.delta_t), format_number(c.tau), format_number(grid.eta),
                   format_number(c.success_rate), format_number(c.error_rate), c.n_entangled, c.n_separable);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::vector<RateRow> read_rate_grid(std::istream& in) {
  expect_header(in, kRateGridHeader);
  std::vector<RateRow> out;
  for_each_row(in, 8, [&](const std::vector<std::string_view>& f) {
    RateRow r;
    r.t_i = parse_number(f[0]);
    r.delta_t = parse_number(f[1]);
    r.tau = parse_number(f[2]);
    r.eta = parse_number(f[3]);
    r.success_rate = parse_number(f[4]);
    r.error_rate = parse_number(f[5]);
    r.n_entangled = parse_count(f[6]);
    r.n_separable = parse_count(f[7]);
    out.push_back(r);
  });
  return out;
}

void write_table(std::ostream& out, const NumericTable& table) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", fmt::join(table.columns, ","));
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      fmt::format_to(std::back_inserter(buf), "{}{}", i ? "," : "", format_number(row[i]));
    buf.push_back('\n');
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

NumericTable read_table(std::istream& in) {
  NumericTable table;
  std::string line;
  if (!std::getline(in, line)) throw IoError("missing CSV header");
  for (auto f : fields(line)) table.columns.emplace_back(f);
  for_each_row(in, table.columns.size(), [&](const std::vector<std::string_view>& f) {
    std::vector<double> row;
    row.reserve(f.size());
    for (auto x : f) row.push_back(parse_number(x));
    table.rows.push_back(std::move(row));
  });
  return table;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw IoError("sha256 init failed");
  std::vector<char> chunk(1 << 16);
  while (in) {
    in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), chunk.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace halfparity
