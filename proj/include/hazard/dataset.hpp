#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace hazard {

// One patient row of the breast-cancer schema.
struct SubjectRecord {
  int id = 0;
  int treat = 0;    // hormonal therapy {0,1}
  double age = 0;   // years
  int men = 0;      // menopausal status {1,2}
  double size = 0;  // tumour size, mm
  int grade = 0;    // tumour grade {1,2,3}
  double nodes = 0; // positive lymph nodes
  double prog = 0;  // progesterone receptor, fmol
  double oest = 0;  // oestrogen receptor, fmol
  double time = 0;  // observed follow-up, days
  int status = 0;   // 1 = event (recurrence), 0 = censored
};

class SurvivalDataset {
 public:
  SurvivalDataset() = default;
  explicit SurvivalDataset(std::vector<SubjectRecord> records)
      : records_(std::move(records)) {}

  const std::vector<SubjectRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  const SubjectRecord& operator[](std::size_t i) const { return records_[i]; }

  std::size_t event_count() const;
  Eigen::VectorXd times() const;
  Eigen::VectorXi events() const;

 private:
  std::vector<SubjectRecord> records_;
};

enum class Encoding { kOrdinal, kDummy };

// Per-column centering/scale fitted on training rows. Columns with scale 1 and
// mean 0 pass through untouched (binary indicators).
struct Standardization {
  Encoding encoding = Encoding::kOrdinal;
  std::vector<std::string> column_names;
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
};

struct DesignMatrix {
  Eigen::MatrixXd X;          // n x p, standardized
  Eigen::VectorXd times;      // days
  Eigen::VectorXi events;     // {0,1}
  Standardization standardization;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

// Parses the 11-column CSV (any column order, header required).
// Throws std::runtime_error naming the offending column or line.
SurvivalDataset load_csv(const std::string& path);

// Writes records back out in schema order.
void write_csv(const SurvivalDataset& ds, const std::string& path);

// Stable sort by status (censored first, file order preserved within each
// group); the last 75 rows become the test set.
std::pair<SurvivalDataset, SurvivalDataset> split_paper(const SurvivalDataset& ds);

// Fits means/scales on fit_rows only; population standard deviation.
Standardization fit_standardization(const SurvivalDataset& fit_rows, Encoding encoding);

// Applies previously fitted statistics to any row set.
DesignMatrix build_design(const SurvivalDataset& rows, const Standardization& st);

}  // namespace hazard
