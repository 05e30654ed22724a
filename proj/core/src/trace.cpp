#include "cocod/trace.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace cocod {

std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

double parse_real(const std::string& text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw std::runtime_error("bad real: '" + text + "'");
  return v;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

void write_trace_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "step,sim_time_s,loss,grad_norm_sq,comm_rounds";
  for (int i = 0; i < trace.n_workers; ++i) out << ",idle_s_worker_" << i;
  out << '\n';
  for (const auto& row : trace.rows) {
    out << row.step << ',' << format_real(row.sim_time) << ',' << format_real(row.loss) << ','
        << format_real(row.grad_norm_sq) << ',' << row.comm_rounds;
    for (double v : row.idle) out << ',' << format_real(v);
    out << '\n';
  }
}

RunTrace parse_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace: " + path);
  const auto header = split_csv_line(line);
  if (header.size() < 5 || header[0] != "step") throw std::runtime_error("bad trace header");
  RunTrace trace;
  trace.n_workers = static_cast<int>(header.size()) - 5;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw std::runtime_error("ragged trace row");
    TraceRow row;
    row.step = std::stoll(cells[0]);
    row.sim_time = parse_real(cells[1]);
    row.loss = parse_real(cells[2]);
    row.grad_norm_sq = parse_real(cells[3]);
    row.comm_rounds = std::stoll(cells[4]);
    for (int i = 0; i < trace.n_workers; ++i) row.idle.push_back(parse_real(cells[5 + i]));
    row.divergence = std::numeric_limits<double>::quiet_NaN();
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

void write_summary_csv(const RunSummary& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "variant,seed,final_loss,final_grad_norm_sq,total_sim_time_s,comm_rounds,measured_ts,"
         "predicted_ts\n";
  out << s.variant << ',' << s.seed << ',' << format_real(s.final_loss) << ','
      << format_real(s.final_grad_norm_sq) << ',' << format_real(s.total_sim_time) << ','
      << s.comm_rounds << ',' << format_real(s.measured_ts) << ',' << format_real(s.predicted_ts)
      << '\n';
}

RunSummary parse_summary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line).size() != 8)
    throw std::runtime_error("bad summary header");
  if (!std::getline(in, line)) throw std::runtime_error("missing summary row");
  const auto cells = split_csv_line(line);
  if (cells.size() != 8) throw std::runtime_error("bad summary row");
  RunSummary s;
  s.variant = cells[0];
  s.seed = std::stoull(cells[1]);
  s.final_loss = parse_real(cells[2]);
  s.final_grad_norm_sq = parse_real(cells[3]);
  s.total_sim_time = parse_real(cells[4]);
  s.comm_rounds = std::stoll(cells[5]);
  s.measured_ts = parse_real(cells[6]);
  s.predicted_ts = parse_real(cells[7]);
  return s;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable parse_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  CsvTable table;
  table.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != table.header.size()) throw std::runtime_error("ragged csv row in " + path);
    table.rows.push_back(std::move(cells));
  }
  return table;
}

namespace {
bool row_hits(const TraceRow& row, const Target& target) {
  const double v = target.metric == Target::Metric::kLoss ? row.loss : row.grad_norm_sq;
  return v <= target.value;
}
}  // namespace

long long steps_to_target(const RunTrace& trace, const Target& target) {
  for (const auto& row : trace.rows)
    if (row_hits(row, target)) return row.step;
  throw std::runtime_error("target unreached");
}

double time_to_target(const RunTrace& trace, const Target& target) {
  for (const auto& row : trace.rows)
    if (row_hits(row, target)) return row.sim_time;
  throw std::runtime_error("target unreached");
}

double measured_speedup(const RunTrace& baseline, const RunTrace& other, const Target& target) {
  const double t1 = time_to_target(baseline, target);
  const double tn = time_to_target(other, target);
  if (t1 == 0.0 && tn == 0.0) return 1.0;  // both start at the target
  return t1 / tn;
}

double measured_iteration_speedup(const RunTrace& baseline, const RunTrace& other,
                                  const Target& target) {
  const double t1 = static_cast<double>(steps_to_target(baseline, target));
  const double tn = static_cast<double>(steps_to_target(other, target));
  if (t1 == 0.0 && tn == 0.0) return 1.0;
  return t1 / tn;
}

}  // namespace cocod
