#include "regsamp/population.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "regsamp/errors.hpp"
#include "regsamp/random.hpp"
#include "regsamp/stats.hpp"

namespace regsamp {

RegionPool::RegionPool(std::string app_label, std::vector<std::string> config_labels, CpiMatrix values,
                       std::uint64_t instructions_per_region)
    : app_label_(std::move(app_label)),
      config_labels_(std::move(config_labels)),
      values_(std::move(values)),
      instructions_per_region_(instructions_per_region) {
  if (values_.rows() < 1) throw ValidationError("region pool needs at least one region");
  if (values_.cols() < 1) throw ValidationError("region pool needs at least one configuration");
  if (static_cast<Eigen::Index>(config_labels_.size()) != values_.cols()) {
    throw ValidationError("region pool has " + std::to_string(values_.cols()) + " value columns but " +
                          std::to_string(config_labels_.size()) + " configuration labels");
  }
  if (instructions_per_region_ == 0) throw ValidationError("instructions_per_region must be positive");
  for (Eigen::Index c = 0; c < values_.cols(); ++c) {
    for (Eigen::Index r = 0; r < values_.rows(); ++r) {
      const double v = values_(r, c);
      if (!std::isfinite(v) || v <= 0.0) {
        std::ostringstream msg;
        msg << "region " << r << ", config " << c << " (" << config_labels_[static_cast<std::size_t>(c)]
            << "): CPI must be finite and positive, got " << v;
        throw ValidationError(msg.str());
      }
    }
  }
}

void RegionPool::check_config(Eigen::Index config) const {
  if (config < 0 || config >= values_.cols()) {
    throw ValidationError("configuration index " + std::to_string(config) + " out of range [0, " +
                          std::to_string(values_.cols()) + ")");
  }
}

PopulationSummary pool_summary(const RegionPool& pool) {
  PopulationSummary out;
  out.configs.reserve(static_cast<std::size_t>(pool.config_count()));
  for (Eigen::Index c = 0; c < pool.config_count(); ++c) {
    const auto col = pool.values().col(c);
    out.configs.push_back({mean(col), sample_std(col), pool.region_count()});
  }
  return out;
}

double true_mean(const RegionPool& pool, Eigen::Index config) { return mean(pool.column(config)); }

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string where(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

RegionPool load_pool_csv(std::istream& in, std::string app_label) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> labels;

  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
      if (!trim(line).empty()) return true;
    }
    return false;
  };

  if (!next_line()) throw ValidationError("pool CSV is empty; expected header `region_id,<config>,...`");
  {
    const auto header = split_fields(line);
    if (header.size() < 2 || trim(header[0]) != "region_id") {
      throw ValidationError(where(line_no, 1) +
                            ": malformed header; expected `region_id,<config_0>,...,<config_C-1>`");
    }
    for (std::size_t i = 1; i < header.size(); ++i) {
      const auto label = trim(header[i]);
      if (label.empty()) throw ValidationError(where(line_no, i + 1) + ": empty configuration label in header");
      labels.emplace_back(label);
    }
  }

  const std::size_t cols = labels.size();
  std::vector<double> flat;
  std::size_t rows = 0;
  while (next_line()) {
    const auto fields = split_fields(line);
    if (fields.size() != cols + 1) {
      throw ValidationError(where(line_no, std::min(fields.size(), cols + 1)) + ": ragged row with " +
                            std::to_string(fields.size()) + " fields, expected " + std::to_string(cols + 1));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const auto cell = trim(fields[c + 1]);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw ValidationError(where(line_no, c + 2) + " (" + labels[c] + "): non-numeric cell `" +
                              std::string(cell) + "`");
      }
      if (!std::isfinite(v) || v <= 0.0) {
        throw ValidationError(where(line_no, c + 2) + " (" + labels[c] + "): CPI must be positive, got `" +
                              std::string(cell) + "`");
      }
      flat.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw ValidationError("pool CSV has a header but no data rows");

  CpiMatrix values(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  return RegionPool(std::move(app_label), std::move(labels), std::move(values));
}

void write_pool_csv(std::ostream& out, const RegionPool& pool) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(std::numeric_limits<double>::max_digits10);
  buf << "region_id";
  for (const auto& label : pool.config_labels()) buf << ',' << label;
  buf << '\n';
  for (Eigen::Index r = 0; r < pool.region_count(); ++r) {
    buf << 'r' << r;
    for (Eigen::Index c = 0; c < pool.config_count(); ++c) buf << ',' << pool.values()(r, c);
    buf << '\n';
  }
  out << buf.str();
}

void SyntheticSpec::validate() const {
  if (config_means.empty()) throw ValidationError("synthetic spec needs at least one config mean");
  if (!config_labels.empty() && config_labels.size() != config_means.size()) {
    throw ValidationError("synthetic spec: config_labels and config_means differ in length");
  }
  if (coupling.size() != 1 && coupling.size() != config_means.size()) {
    throw ValidationError("synthetic spec: coupling must have one entry or one per config");
  }
  if (region_count < 2) throw ValidationError("synthetic spec: region_count must be at least 2");
  if (!(floor_fraction > 0.0 && floor_fraction < 1.0)) {
    throw ValidationError("synthetic spec: floor_fraction must lie in (0, 1)");
  }
  for (std::size_t c = 0; c < config_means.size(); ++c) {
    if (!(config_means[c] > 0.0) || !std::isfinite(config_means[c])) {
      throw ValidationError("synthetic spec: config mean " + std::to_string(c) + " must be positive");
    }
    if (!(sigma(c) >= 0.0)) {
      throw ValidationError("synthetic spec: std_slope*mean+std_intercept is negative for config " +
                            std::to_string(c));
    }
    const double rho = coupling_for(c);
    if (!(rho >= 0.0 && rho <= 1.0)) {
      throw ValidationError("synthetic spec: coupling for config " + std::to_string(c) + " must lie in [0, 1]");
    }
  }
}

RegionPool generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto configs = static_cast<Eigen::Index>(spec.config_means.size());
  CpiMatrix values(spec.region_count, configs);
  SplitMix64 rng(derive_seed(seed, SeedPurpose::kSynthetic, 0));
  // Row-major draw order: z_i, then eps_i0 .. eps_i(C-1).
  for (Eigen::Index i = 0; i < spec.region_count; ++i) {
    const double z = rng.normal();
    for (Eigen::Index c = 0; c < configs; ++c) {
      const auto cu = static_cast<std::size_t>(c);
      const double eps = rng.normal();
      const double mu = spec.config_means[cu];
      const double rho = spec.coupling_for(cu);
      const double draw = mu + spec.sigma(cu) * (rho * z + std::sqrt(1.0 - rho * rho) * eps);
      values(i, c) = std::max(spec.floor_fraction * mu, draw);
    }
  }
  std::vector<std::string> labels = spec.config_labels;
  if (labels.empty()) {
    for (Eigen::Index c = 0; c < configs; ++c) labels.push_back("config_" + std::to_string(c));
  }
  return RegionPool(spec.app_label, std::move(labels), std::move(values));
}

SyntheticSpec default_synthetic_spec() {
  SyntheticSpec spec;
  constexpr int kConfigs = 7;
  constexpr double kIpcLow = 1.52;
  constexpr double kIpcHigh = 2.56;
  for (int c = 0; c < kConfigs; ++c) {
    const double ipc = kIpcLow * std::pow(kIpcHigh / kIpcLow, static_cast<double>(c) / (kConfigs - 1));
    spec.config_means.push_back(1.0 / ipc);
  }
  spec.std_slope = 0.3;
  spec.std_intercept = 0.0;
  spec.coupling = {0.9};
  spec.region_count = 2000;
  spec.floor_fraction = 0.05;
  return spec;
}

SyntheticSpec heterogeneous_synthetic_spec() {
  SyntheticSpec spec = default_synthetic_spec();
  spec.app_label = "synthetic-heterogeneous";
  spec.coupling = {0.8, 0.9, 1.0, 0.98, 0.97, 0.99, 0.96};
  return spec;
}

}  // namespace regsamp
