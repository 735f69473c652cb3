#include "geoflow/output.hpp"

#include <cstdio>
#include <fstream>

#include "geoflow/errors.hpp"

namespace geoflow {

namespace {

void cell(std::string& out, double v) {
  if (!present(v)) return;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void write_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream os(file, std::ios::binary);
  os << text;
  os.close();
  if (!os) throw Error("cannot write " + file.string());
}

}  // namespace

std::string series_csv(const std::vector<SeriesRow>& rows) {
  std::string out = kSeriesHeader;
  out += '\n';
  for (const auto& r : rows) {
    for (double v : {r.t, r.I, r.D, r.U3, r.U4, r.kappa, r.s, r.lambda1, r.slack_hamilton}) {
      cell(out, v);
      out += ',';
    }
    cell(out, r.slack_liyau);
    out += '\n';
  }
  return out;
}

void emit_outputs(const ScenarioResult& result, const std::filesystem::path& dir, bool series) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  if (series) write_file(dir / "series.csv", series_csv(result.rows));
  write_file(dir / "report.json", to_json(result.report).dump(2) + "\n");
}

int exit_code(const Report& report) { return report.all_pass() ? 0 : 2; }

}  // namespace geoflow
