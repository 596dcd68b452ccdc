#include "cards/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cards {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

json partition_to_json(const Partition& part) {
  json groups = json::array();
  for (const auto& g : part.groups) {
    json idx = json::array();
    for (int j : g) idx.push_back(j + 1);
    groups.push_back(idx);
  }
  json out;
  out["groups"] = groups;
  json zero = json::array();
  for (int j : part.zero_group) zero.push_back(j + 1);
  out["zero_group"] = zero;
  return out;
}

}  // namespace

Dataset parse_dataset_csv(const std::string& path, const std::string& response) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty file: " + path);
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  if (header.empty()) throw Error(ErrorCode::ParseError, "missing header row");

  int resp_col = 0;
  if (!response.empty()) {
    const auto it = std::find(header.begin(), header.end(), response);
    if (it == header.end()) {
      throw Error(ErrorCode::MissingResponse, "response column '" + response + "' not found");
    }
    resp_col = static_cast<int>(it - header.begin());
  }

  const int ncols = static_cast<int>(header.size());
  if (ncols < 2) throw Error(ErrorCode::ParseError, "need a response and at least one predictor");

  std::vector<double> yvals;
  std::vector<double> xvals;  // row-major
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != ncols) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineno) + ": expected " + std::to_string(ncols) +
                      " cells, got " + std::to_string(cells.size()),
                  lineno);
    }
    for (int c = 0; c < ncols; ++c) {
      const std::string cell = trim(cells[static_cast<size_t>(c)]);
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::NonNumeric,
                    "line " + std::to_string(lineno) + ", column " + std::to_string(c + 1) +
                        ": cannot parse '" + cell + "'",
                    lineno);
      }
      if (c == resp_col) {
        yvals.push_back(v);
      } else {
        xvals.push_back(v);
      }
    }
  }
  if (yvals.empty()) throw Error(ErrorCode::ParseError, "no data rows in " + path);

  const int n = static_cast<int>(yvals.size());
  const int p = ncols - 1;
  Matrix X(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = xvals[static_cast<size_t>(i) * p + j];
  }
  Dataset ds;
  ds.X = DesignMatrix::from(std::move(X));
  ds.y = ResponseVector::from(Eigen::Map<Vector>(yvals.data(), n));
  ds.response_name = header[static_cast<size_t>(resp_col)];
  for (int c = 0; c < ncols; ++c) {
    if (c != resp_col) ds.predictor_names.push_back(header[static_cast<size_t>(c)]);
  }
  return ds;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
    if (!out.good()) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::IoError, "rename failed: " + ec.message());
}

std::string fit_report_json(const FitResult& fit, int n, int p) {
  json j;
  j["schema"] = "cards-report/1";
  j["kind"] = "fit";
  j["n"] = n;
  j["p"] = p;
  j["method"] = fit.settings.method;
  j["penalty"] = fit.settings.penalty;
  j["lambda"] = fit.settings.lambda;
  j["lambda1"] = fit.settings.lambda1;
  j["lambda2"] = fit.settings.lambda2;
  j["sparsity_lambda"] = fit.settings.sparsity_lambda;
  j["delta"] = fit.settings.delta;
  j["a"] = fit.settings.a;
  j["standardized"] = fit.settings.standardized;
  j["centered"] = fit.settings.centered;
  j["extract_tol"] = fit.settings.extract_tol;
  j["intercept"] = fit.intercept;
  j["coefficients"] = std::vector<double>(fit.coefficients.data(),
                                          fit.coefficients.data() + fit.coefficients.size());
  j.update(partition_to_json(fit.partition));
  j["objective"] = fit.objective;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["objective_trace"] = fit.objective_trace;
  j["warnings"] = fit.warnings;
  double worst_kkt = 0.0;
  long admm_total = 0;
  for (const auto& s : fit.inner_stats) {
    worst_kkt = std::max(worst_kkt, s.kkt_residual);
    admm_total += s.iterations;
  }
  j["diagnostics"] = {{"worst_kkt_residual", worst_kkt}, {"admm_iterations", admm_total}};
  if (!fit.standard_errors.empty()) j["group_standard_errors"] = fit.standard_errors;
  return j.dump(2) + "\n";
}

void write_fit_report(const FitResult& fit, int n, int p, const std::string& path) {
  atomic_write(path, fit_report_json(fit, n, p));
}

ParsedFitReport parse_fit_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad fit report: ") + e.what());
  }
  ParsedFitReport rep;
  const auto coef = j.at("coefficients").get<std::vector<double>>();
  rep.coefficients = Eigen::Map<const Vector>(coef.data(), static_cast<Eigen::Index>(coef.size()));
  rep.intercept = j.at("intercept").get<double>();
  rep.objective = j.at("objective").get<double>();
  rep.method = j.value("method", "");
  for (const auto& g : j.at("groups")) {
    std::vector<int> idx;
    for (const auto& v : g) idx.push_back(v.get<int>() - 1);
    rep.partition.groups.push_back(std::move(idx));
  }
  if (j.contains("zero_group")) {
    for (const auto& v : j["zero_group"]) rep.partition.zero_group.push_back(v.get<int>() - 1);
  }
  return rep;
}

std::string sim_csv(const SimReport& report) {
  std::string out = "rep,method,pe,nmi,fp\n";
  for (const auto& row : report.rows) {
    out += std::to_string(row.rep + 1);
    out += ',';
    out += sim_method_name(row.method);
    out += ',';
    if (std::isfinite(row.pe)) out += format_double(row.pe);
    out += ',';
    if (std::isfinite(row.nmi)) out += format_double(row.nmi);
    out += ',';
    if (std::isfinite(row.fp)) out += format_double(row.fp);
    out += '\n';
  }
  return out;
}

std::string sim_summary_json(const SimReport& report) {
  json j;
  j["schema"] = "cards-report/1";
  j["kind"] = "simulation";
  j["experiment"] = report.config.experiment;
  if (report.config.experiment == 3) {
    j["T"] = report.config.T;
  } else {
    j["r"] = report.config.r;
  }
  j["reps"] = report.config.reps;
  j["seed"] = report.config.master_seed;
  j["test_size"] = report.config.test_size;
  j["criterion"] = report.config.criterion == Criterion::Bic ? "bic" : "gcv";
  j["failed_reps"] = report.failed_reps;
  json methods = json::array();
  json medians = json::object();
  for (size_t m = 0; m < report.methods.size(); ++m) {
    const std::string name = sim_method_name(report.methods[m]);
    methods.push_back(name);
    json med;
    if (std::isfinite(report.median_pe[m])) med["pe"] = report.median_pe[m];
    if (std::isfinite(report.median_nmi[m])) med["nmi"] = report.median_nmi[m];
    if (std::isfinite(report.median_fp[m])) med["fp"] = report.median_fp[m];
    medians[name] = med;
  }
  j["methods"] = methods;
  j["medians"] = medians;
  return j.dump(2) + "\n";
}

void write_sim_report(const SimReport& report, const std::string& csv_path,
                      const std::string& json_path) {
  if (!csv_path.empty()) atomic_write(csv_path, sim_csv(report));
  if (!json_path.empty()) atomic_write(json_path, sim_summary_json(report));
}

std::string sim_svg_boxplot(const SimReport& report, const std::string& metric) {
  const int M = static_cast<int>(report.methods.size());
  std::vector<std::vector<double>> samples(static_cast<size_t>(M));
  for (const auto& row : report.rows) {
    if (row.failed) continue;
    const double v = metric == "pe" ? row.pe : metric == "nmi" ? row.nmi : row.fp;
    if (!std::isfinite(v)) continue;
    for (int m = 0; m < M; ++m) {
      if (report.methods[static_cast<size_t>(m)] == row.method) {
        samples[static_cast<size_t>(m)].push_back(v);
        break;
      }
    }
  }
  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const auto& s : samples) {
    for (double v : s) {
      if (first) {
        lo = hi = v;
        first = false;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (hi <= lo) hi = lo + 1.0;

  const double width = 120.0 * M + 60.0, height = 360.0, top = 20.0, bottom = 320.0;
  auto ycoord = [&](double v) { return bottom - (v - lo) / (hi - lo) * (bottom - top); };
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "'>\n";
  svg << "<text x='10' y='" << height - 6 << "' font-size='12'>" << metric << "</text>\n";
  for (int m = 0; m < M; ++m) {
    auto s = samples[static_cast<size_t>(m)];
    const double cx = 60.0 + 120.0 * m + 40.0;
    svg << "<text x='" << cx - 20 << "' y='" << bottom + 18 << "' font-size='12'>"
        << sim_method_name(report.methods[static_cast<size_t>(m)]) << "</text>\n";
    if (s.empty()) continue;
    std::sort(s.begin(), s.end());
    auto quant = [&](double f) {
      const double pos = f * (static_cast<double>(s.size()) - 1.0);
      const size_t i = static_cast<size_t>(pos);
      const double frac = pos - static_cast<double>(i);
      return i + 1 < s.size() ? s[i] * (1.0 - frac) + s[i + 1] * frac : s[i];
    };
    const double q1 = quant(0.25), q2 = quant(0.5), q3 = quant(0.75);
    svg << "<line x1='" << cx << "' y1='" << ycoord(s.front()) << "' x2='" << cx << "' y2='"
        << ycoord(s.back()) << "' stroke='black'/>\n";
    svg << "<rect x='" << cx - 30 << "' y='" << ycoord(q3) << "' width='60' height='"
        << ycoord(q1) - ycoord(q3) << "' fill='none' stroke='black'/>\n";
    svg << "<line x1='" << cx - 30 << "' y1='" << ycoord(q2) << "' x2='" << cx + 30 << "' y2='"
        << ycoord(q2) << "' stroke='red'/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

PartitionFile parse_partition_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad partition file: ") + e.what());
  }
  PartitionFile out;
  const json* groups = nullptr;
  if (j.is_array()) {
    groups = &j;
  } else if (j.is_object() && j.contains("groups")) {
    groups = &j["groups"];
  } else {
    throw Error(ErrorCode::ParseError, "partition file must be an array of index arrays");
  }
  for (const auto& g : *groups) {
    std::vector<int> idx;
    for (const auto& v : g) {
      if (!v.is_number_integer() || v.get<int>() < 1) {
        throw Error(ErrorCode::ParseError, "partition indices must be 1-based integers");
      }
      idx.push_back(v.get<int>() - 1);
    }
    out.part.groups.push_back(std::move(idx));
  }
  if (j.is_object() && j.contains("zero_group")) {
    for (const auto& v : j["zero_group"]) out.part.zero_group.push_back(v.get<int>() - 1);
  }
  if (j.is_object() && j.contains("values")) {
    const auto vals = j["values"].get<std::vector<double>>();
    out.values = Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  }
  return out;
}

}  // namespace cards
