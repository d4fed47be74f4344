#include "hazard/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace hazard {

namespace {

const std::vector<std::string> kSchema = {
    "id", "treat", "age", "men", "size", "grade",
    "nodes", "prog", "oest", "time", "status"};

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_cell(const std::string& cell, const std::string& column, std::size_t line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": cannot parse '" +
                             cell + "' in column '" + column + "'");
  }
}

void validate(const SubjectRecord& r, std::size_t line_no) {
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
  };
  if (r.time <= 0) fail("time must be positive");
  if (r.status != 0 && r.status != 1) fail("status must be 0 or 1");
  if (r.treat != 0 && r.treat != 1) fail("treat must be 0 or 1");
  if (r.men != 1 && r.men != 2) fail("men must be 1 or 2");
  if (r.grade < 1 || r.grade > 3) fail("grade must be 1, 2 or 3");
  if (r.nodes < 0) fail("nodes must be non-negative");
  if (r.size <= 0) fail("size must be positive");
}

}  // namespace

std::size_t SurvivalDataset::event_count() const {
  std::size_t n = 0;
  for (const auto& r : records_) n += static_cast<std::size_t>(r.status);
  return n;
}

Eigen::VectorXd SurvivalDataset::times() const {
  Eigen::VectorXd t(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) t[static_cast<Eigen::Index>(i)] = records_[i].time;
  return t;
}

Eigen::VectorXi SurvivalDataset::events() const {
  Eigen::VectorXi e(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) e[static_cast<Eigen::Index>(i)] = records_[i].status;
  return e;
}

SurvivalDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("'" + path + "': empty file");
  if (!header.empty() && header.back() == '\r') header.pop_back();

  auto names = split_line(header);
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < names.size(); ++i) pos[names[i]] = i;
  for (const auto& col : kSchema) {
    if (!pos.count(col)) throw std::runtime_error("'" + path + "': missing column '" + col + "'");
  }

  std::vector<SubjectRecord> records;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != names.size()) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(names.size()) + " cells, got " +
                               std::to_string(cells.size()));
    }
    auto cell = [&](const std::string& col) -> double {
      return parse_cell(cells[pos.at(col)], col, line_no);
    };
    SubjectRecord r;
    r.id = static_cast<int>(cell("id"));
    r.treat = static_cast<int>(cell("treat"));
    r.age = cell("age");
    r.men = static_cast<int>(cell("men"));
    r.size = cell("size");
    r.grade = static_cast<int>(cell("grade"));
    r.nodes = cell("nodes");
    r.prog = cell("prog");
    r.oest = cell("oest");
    r.time = cell("time");
    r.status = static_cast<int>(cell("status"));
    validate(r, line_no);
    records.push_back(r);
  }
  if (records.empty()) throw std::runtime_error("'" + path + "': no data rows");
  return SurvivalDataset(std::move(records));
}

void write_csv(const SurvivalDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "id,treat,age,men,size,grade,nodes,prog,oest,time,status\n";
  auto num = [](double v) {
    std::ostringstream s;
    if (v == std::floor(v) && std::abs(v) < 1e15) {
      s << static_cast<long long>(v);
    } else {
      s.precision(17);
      s << v;
    }
    return s.str();
  };
  for (const auto& r : ds.records()) {
    out << r.id << ',' << r.treat << ',' << num(r.age) << ',' << r.men << ','
        << num(r.size) << ',' << r.grade << ',' << num(r.nodes) << ',' << num(r.prog)
        << ',' << num(r.oest) << ',' << num(r.time) << ',' << r.status << '\n';
  }
}

std::pair<SurvivalDataset, SurvivalDataset> split_paper(const SurvivalDataset& ds) {
  if (ds.size() < 76) throw std::runtime_error("split requires at least 76 rows");
  std::vector<SubjectRecord> sorted(ds.records());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const SubjectRecord& a, const SubjectRecord& b) {
                     return a.status < b.status;
                   });
  const std::size_t cut = sorted.size() - 75;
  std::vector<SubjectRecord> train(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(cut));
  std::vector<SubjectRecord> test(sorted.begin() + static_cast<std::ptrdiff_t>(cut), sorted.end());
  return {SurvivalDataset(std::move(train)), SurvivalDataset(std::move(test))};
}

namespace {

// Raw (unstandardized) design row for the chosen encoding.
std::vector<double> raw_row(const SubjectRecord& r, Encoding enc) {
  if (enc == Encoding::kOrdinal) {
    return {static_cast<double>(r.treat), r.age, static_cast<double>(r.men),
            r.size, static_cast<double>(r.grade), r.nodes, r.prog, r.oest};
  }
  return {static_cast<double>(r.treat),
          r.age,
          r.men == 2 ? 1.0 : 0.0,
          r.size,
          r.grade == 2 ? 1.0 : 0.0,
          r.grade == 3 ? 1.0 : 0.0,
          r.nodes,
          r.prog,
          r.oest};
}

std::vector<std::string> column_names(Encoding enc) {
  if (enc == Encoding::kOrdinal) {
    return {"treat", "age", "men", "size", "grade", "nodes", "prog", "oest"};
  }
  return {"treat", "age", "men2", "size", "grade2", "grade3", "nodes", "prog", "oest"};
}

bool is_standardized_column(const std::string& name, Encoding enc) {
  if (name == "treat" || name == "men2" || name == "grade2" || name == "grade3") return false;
  (void)enc;
  return true;  // ordinal mode standardizes men and grade as integers
}

}  // namespace

Standardization fit_standardization(const SurvivalDataset& fit_rows, Encoding encoding) {
  if (fit_rows.size() == 0) throw std::runtime_error("standardization needs at least one row");
  Standardization st;
  st.encoding = encoding;
  st.column_names = column_names(encoding);
  const Eigen::Index p = static_cast<Eigen::Index>(st.column_names.size());
  const Eigen::Index n = static_cast<Eigen::Index>(fit_rows.size());

  Eigen::MatrixXd raw(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = raw_row(fit_rows[static_cast<std::size_t>(i)], encoding);
    for (Eigen::Index j = 0; j < p; ++j) raw(i, j) = row[static_cast<std::size_t>(j)];
  }

  st.mean = Eigen::VectorXd::Zero(p);
  st.sd = Eigen::VectorXd::Ones(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!is_standardized_column(st.column_names[static_cast<std::size_t>(j)], encoding)) continue;
    const double mean = raw.col(j).mean();
    const double var = (raw.col(j).array() - mean).square().sum() / static_cast<double>(n);
    const double sd = std::sqrt(var);
    if (sd <= 0.0) {
      throw std::runtime_error("zero-variance covariate '" +
                               st.column_names[static_cast<std::size_t>(j)] + "'");
    }
    st.mean[j] = mean;
    st.sd[j] = sd;
  }
  return st;
}

DesignMatrix build_design(const SurvivalDataset& rows, const Standardization& st) {
  DesignMatrix d;
  d.standardization = st;
  const Eigen::Index p = static_cast<Eigen::Index>(st.column_names.size());
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  d.X.resize(n, p);
  d.times = rows.times();
  d.events = rows.events();
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = raw_row(rows[static_cast<std::size_t>(i)], st.encoding);
    for (Eigen::Index j = 0; j < p; ++j) {
      d.X(i, j) = (row[static_cast<std::size_t>(j)] - st.mean[j]) / st.sd[j];
    }
  }
  if (!d.X.allFinite()) throw std::runtime_error("non-finite value in design matrix");
  return d;
}

}  // namespace hazard
