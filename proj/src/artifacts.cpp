#include "fockflow/artifacts.hpp"

#include <cstdio>
#include <ostream>

namespace fockflow {

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_comment_block(std::ostream& out, std::string_view header) {
  std::size_t pos = 0;
  while (pos < header.size()) {
    auto nl = header.find('\n', pos);
    if (nl == std::string_view::npos) nl = header.size();
    out << "# " << header.substr(pos, nl - pos) << '\n';
    pos = nl + 1;
  }
}

namespace {

void energy_columns(std::ostream& out, std::size_t m) {
  for (std::size_t q = 0; q < m; ++q) out << ",E_" << q;
}

void energy_values(std::ostream& out, const Eigen::VectorXd& e) {
  for (Eigen::Index q = 0; q < e.size(); ++q) out << ',' << csv_number(e(q));
}

}  // namespace

void write_spectrum_csv(std::ostream& out, std::string_view header, const std::vector<SpectrumSlice>& slices,
                        std::size_t l) {
  write_comment_block(out, header);
  const std::size_t m = slices.empty() ? 0 : slices.front().levels();
  out << 's';
  energy_columns(out, m);
  out << ",gap_" << l << '\n';
  for (const auto& slice : slices) {
    out << csv_number(slice.s);
    energy_values(out, slice.energies);
    const auto i = static_cast<Eigen::Index>(l);
    const double gap = i + 1 < slice.energies.size() ? slice.energies(i + 1) - slice.energies(i) : NAN;
    out << ',' << csv_number(gap) << '\n';
  }
}

void write_gap_csv(std::ostream& out, std::string_view header, const GapReport& report) {
  write_comment_block(out, header);
  const std::size_t m = report.energies.empty() ? 0 : static_cast<std::size_t>(report.energies.front().size());
  out << 's';
  energy_columns(out, m);
  out << ",gap_" << report.pair << '\n';
  for (std::size_t k = 0; k < report.s.size(); ++k) {
    out << csv_number(report.s[k]);
    energy_values(out, report.energies[k]);
    out << ',' << csv_number(report.gaps[k]) << '\n';
  }
}

void write_flow_csv(std::ostream& out, std::string_view header, const FlowTrajectory& trajectory) {
  write_comment_block(out, header);
  const std::size_t m = trajectory.states.empty() ? 0 : trajectory.states.front().levels();
  out << 's';
  energy_columns(out, m);
  out << ",norm_drift,min_gap\n";
  for (const auto& st : trajectory.states) {
    out << csv_number(st.s);
    energy_values(out, st.energies);
    out << ',' << csv_number(st.norm_drift) << ',' << csv_number(st.min_gap) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, std::string_view header, const std::vector<SweepPoint>& points) {
  write_comment_block(out, header);
  out << "T,probability,norm_drift,slices\n";
  for (const auto& p : points)
    out << csv_number(p.total_time) << ',' << csv_number(p.probability) << ',' << csv_number(p.norm_drift) << ','
        << p.slices << '\n';
}

}  // namespace fockflow
