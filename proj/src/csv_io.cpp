#include "uwbfuse/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string_view>

#include "uwbfuse/errors.hpp"

namespace uwbfuse {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Column-name indexed view over a CSV table.
class Table {
 public:
  explicit Table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("CSV input is empty");
    header_ = split(line);
    for (std::size_t i = 0; i < header_.size(); ++i) index_[header_[i]] = i;
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      auto fields = split(line);
      if (fields.size() != header_.size()) {
        throw DataError("CSV line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header_.size()) + " fields, got " +
                        std::to_string(fields.size()));
      }
      rows_.push_back(std::move(fields));
      lines_.push_back(line_no);
    }
  }

  const std::vector<std::string>& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }
  bool has(const std::string& column) const { return index_.count(column) > 0; }

  const std::string& field(std::size_t row, const std::string& column) const {
    auto it = index_.find(column);
    if (it == index_.end()) throw DataError("CSV is missing column '" + column + "'");
    return rows_[row][it->second];
  }

  double number(std::size_t row, const std::string& column) const {
    const std::string& f = field(row, column);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
      throw DataError(where(row, column) + ": not a number: '" + f + "'");
    }
    return v;
  }

  std::optional<double> optional_number(std::size_t row, const std::string& column) const {
    if (field(row, column).empty()) return std::nullopt;
    return number(row, column);
  }

  std::int64_t integer(std::size_t row, const std::string& column) const {
    const std::string& f = field(row, column);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
      throw DataError(where(row, column) + ": not an integer: '" + f + "'");
    }
    return v;
  }

  std::string where(std::size_t row, const std::string& column) const {
    return "CSV line " + std::to_string(lines_[row]) + " column '" + column + "'";
  }

  /// Station ids of columns named `<prefix><id>`, in header order.
  std::vector<int> suffix_ids(const std::string& prefix) const {
    std::vector<int> ids;
    for (const auto& h : header_) {
      if (h.size() > prefix.size() && h.compare(0, prefix.size(), prefix) == 0) {
        int id = 0;
        const char* b = h.data() + prefix.size();
        const char* e = h.data() + h.size();
        const auto [ptr, ec] = std::from_chars(b, e, id);
        if (ec == std::errc() && ptr == e) ids.push_back(id);
      }
    }
    return ids;
  }

 private:
  std::vector<std::string> header_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<int> lines_;
};

std::string sid(int id) { return std::to_string(id); }

// The initiating station is the only non-tag station that is not an anchor column.
int infer_reference(const Scene& scene, const std::vector<int>& anchor_ids) {
  const std::set<int> anchors(anchor_ids.begin(), anchor_ids.end());
  const int tag = scene.tag().id;
  for (int id : anchor_ids) {
    if (!scene.has_station(id) || id == tag) {
      throw DataError("CSV anchor column refers to unknown or tag station " + sid(id));
    }
  }
  std::vector<int> candidates;
  for (const auto& s : scene.stations) {
    if (s.id != tag && !anchors.count(s.id)) candidates.push_back(s.id);
  }
  if (candidates.size() != 1) {
    throw DataError("cannot identify the initiating station from the CSV anchor columns");
  }
  return candidates.front();
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << '\n';
}

std::vector<int> anchor_ids_of(const ExchangeRecord& r) {
  std::vector<int> ids;
  for (const auto& a : r.anchors) ids.push_back(a.id);
  return ids;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_records_csv(std::ostream& out, const std::vector<ExchangeRecord>& records) {
  const std::vector<int> ids = records.empty() ? std::vector<int>{} : anchor_ids_of(records[0]);
  const bool truth = !records.empty() && std::all_of(records.begin(), records.end(),
                                                     [](const auto& r) { return r.truth; });
  std::vector<std::string> header{"round_idx", "t1_r", "t2_r", "t3_r", "p2_r",
                                  "t1_t",      "t2_t", "t3_t", "p1_t", "p3_t"};
  for (int id : ids) {
    for (const char* c : {"t1_s", "t2_s", "t3_s", "p1_s", "p2_s"}) header.push_back(c + sid(id));
  }
  if (truth) {
    header.emplace_back("true_x");
    header.emplace_back("true_y");
  }
  write_row(out, header);

  for (const auto& r : records) {
    if (anchor_ids_of(r) != ids) throw DataError("records list different anchors");
    std::vector<std::string> f{std::to_string(r.round_idx), format_double(r.t1_r),
                               format_double(r.t2_r),       format_double(r.t3_r),
                               format_double(r.p2_r),       format_double(r.t1_t),
                               format_double(r.t2_t),       format_double(r.t3_t),
                               format_double(r.p1_t),       format_double(r.p3_t)};
    for (const auto& a : r.anchors) {
      f.push_back(format_double(a.t1));
      f.push_back(format_double(a.t2));
      f.push_back(a.t3 ? format_double(*a.t3) : std::string());
      f.push_back(format_double(a.p1));
      f.push_back(format_double(a.p2));
    }
    if (truth) {
      f.push_back(format_double(r.truth->tag_position.x()));
      f.push_back(format_double(r.truth->tag_position.y()));
    }
    write_row(out, f);
  }
}

std::vector<ExchangeRecord> read_records_csv(std::istream& in, const Scene& scene) {
  const Table t(in);
  const std::vector<int> ids = t.suffix_ids("t1_s");
  const int reference = infer_reference(scene, ids);
  const bool truth = t.has("true_x") && t.has("true_y");

  std::vector<ExchangeRecord> out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    ExchangeRecord r;
    r.round_idx = t.integer(i, "round_idx");
    r.reference_id = reference;
    r.tag_id = scene.tag().id;
    r.t1_r = t.number(i, "t1_r");
    r.t2_r = t.number(i, "t2_r");
    r.t3_r = t.number(i, "t3_r");
    r.p2_r = t.number(i, "p2_r");
    r.t1_t = t.number(i, "t1_t");
    r.t2_t = t.number(i, "t2_t");
    r.t3_t = t.number(i, "t3_t");
    r.p1_t = t.number(i, "p1_t");
    r.p3_t = t.number(i, "p3_t");
    for (int id : ids) {
      AnchorTimestamps a;
      a.id = id;
      a.t1 = t.number(i, "t1_s" + sid(id));
      a.t2 = t.number(i, "t2_s" + sid(id));
      a.t3 = t.optional_number(i, "t3_s" + sid(id));
      a.p1 = t.number(i, "p1_s" + sid(id));
      a.p2 = t.number(i, "p2_s" + sid(id));
      r.anchors.push_back(a);
    }
    if (truth) {
      ExchangeTruth tr;
      tr.tag_position = Eigen::Vector3d(t.number(i, "true_x"), t.number(i, "true_y"),
                                        scene.tag().position.z());
      r.truth = tr;
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_corrected_csv(std::ostream& out, const std::vector<CorrectedMeasurement>& rows,
                         bool diagnostics) {
  std::vector<int> ids;
  if (!rows.empty()) {
    for (const auto& [id, a] : rows[0].anchors) ids.push_back(id);
  }
  std::vector<std::string> header{"round_idx", "t_toa"};
  for (int id : ids) header.push_back("t_tdoa_s" + sid(id));
  if (diagnostics) {
    header.emplace_back("c13_rt");
    for (int id : ids) header.push_back("c13_s" + sid(id));
    header.emplace_back("e1");
    header.emplace_back("e2");
    for (int id : ids) {
      header.push_back("e3_s" + sid(id));
      header.push_back("e4_s" + sid(id));
    }
    header.emplace_back("k");
  }
  write_row(out, header);

  for (const auto& m : rows) {
    if (m.anchors.size() != ids.size()) throw DataError("corrected rows list different anchors");
    std::vector<std::string> f{std::to_string(m.round_idx), format_double(m.t_toa)};
    for (int id : ids) {
      const auto& a = m.anchors.at(id);
      f.push_back(a.t_tdoa ? format_double(*a.t_tdoa) : std::string());
    }
    if (diagnostics) {
      f.push_back(format_double(m.c13_rt));
      for (int id : ids) f.push_back(format_double(m.anchors.at(id).c13));
      f.push_back(format_double(m.e1));
      f.push_back(format_double(m.e2));
      for (int id : ids) {
        f.push_back(format_double(m.anchors.at(id).e3));
        f.push_back(format_double(m.anchors.at(id).e4));
      }
      f.push_back(format_double(m.k));
    }
    write_row(out, f);
  }
}

std::vector<CorrectedMeasurement> read_corrected_csv(std::istream& in, const Scene& scene) {
  const Table t(in);
  const std::vector<int> ids = t.suffix_ids("t_tdoa_s");
  const int reference = infer_reference(scene, ids);
  const bool diagnostics = t.has("c13_rt");

  std::vector<CorrectedMeasurement> out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CorrectedMeasurement m;
    m.round_idx = t.integer(i, "round_idx");
    m.reference_id = reference;
    m.tag_id = scene.tag().id;
    m.t_toa = t.number(i, "t_toa");
    m.toa_negative = m.t_toa < 0.0;
    for (int id : ids) {
      AnchorCorrection a;
      a.t_tdoa = t.optional_number(i, "t_tdoa_s" + sid(id));
      if (!a.t_tdoa) a.error = "failed upstream";
      if (diagnostics) {
        a.c13 = t.number(i, "c13_s" + sid(id));
        a.e3 = t.number(i, "e3_s" + sid(id));
        a.e4 = t.number(i, "e4_s" + sid(id));
      }
      m.anchors.emplace(id, std::move(a));
    }
    if (diagnostics) {
      m.c13_rt = t.number(i, "c13_rt");
      m.e1 = t.number(i, "e1");
      m.e2 = t.number(i, "e2");
      m.k = t.number(i, "k");
    }
    out.push_back(std::move(m));
  }
  return out;
}

void write_estimates_csv(std::ostream& out, const std::vector<RoundEstimate>& rows) {
  write_row(out, {"round_idx", "mode", "x", "y", "residual_norm", "iterations", "converged",
                  "cov_xx", "cov_xy", "cov_yy"});
  for (const auto& r : rows) {
    const auto& e = r.estimate;
    write_row(out, {std::to_string(r.round_idx), std::string(to_string(r.mode)),
                    format_double(e.position.x()), format_double(e.position.y()),
                    format_double(e.residual_norm), std::to_string(e.iterations),
                    e.converged ? "1" : "0", format_double(e.covariance(0, 0)),
                    format_double(e.covariance(0, 1)), format_double(e.covariance(1, 1))});
  }
}

std::vector<RoundEstimate> read_estimates_csv(std::istream& in) {
  const Table t(in);
  std::vector<RoundEstimate> out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    RoundEstimate r;
    r.round_idx = t.integer(i, "round_idx");
    try {
      r.mode = solve_mode_from_string(t.field(i, "mode"));
    } catch (const ConfigError&) {
      throw DataError(t.where(i, "mode") + ": unknown mode '" + t.field(i, "mode") + "'");
    }
    auto& e = r.estimate;
    e.position = Eigen::Vector2d(t.number(i, "x"), t.number(i, "y"));
    e.residual_norm = t.number(i, "residual_norm");
    e.iterations = static_cast<int>(t.integer(i, "iterations"));
    e.converged = t.integer(i, "converged") != 0;
    const double xy = t.number(i, "cov_xy");
    e.covariance << t.number(i, "cov_xx"), xy, xy, t.number(i, "cov_yy");
    out.push_back(r);
  }
  return out;
}

}  // namespace uwbfuse
