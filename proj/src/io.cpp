#include "gfbm/io.hpp"

#include "gfbm/errors.hpp"

#include <cstdio>
#include <fstream>

namespace gfbm {

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::unique_ptr<std::ostream> open_file(const std::string& path)
{
    auto f = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*f)
        throw DomainError("cannot open output file " + path);
    return f;
}

} // namespace

CsvWriter::CsvWriter(const std::string& path) : owned_(open_file(path))
{
    out_ = owned_.get();
}

CsvWriter::CsvWriter(std::ostream& out) : out_(&out) {}

CsvWriter::~CsvWriter()
{
    if (out_)
        out_->flush();
}

void CsvWriter::header(const std::vector<std::string>& names)
{
    for (const auto& n : names)
        cell(n);
    end_row();
}

CsvWriter& CsvWriter::cell(double x)
{
    return cell(format_double(x));
}

CsvWriter& CsvWriter::cell(long long x)
{
    return cell(std::to_string(x));
}

CsvWriter& CsvWriter::cell(const std::string& s)
{
    if (!first_)
        *out_ << ',';
    *out_ << s;
    first_ = false;
    return *this;
}

void CsvWriter::end_row()
{
    *out_ << '\n';
    first_ = true;
    if (!*out_)
        throw NumericalError("write failure");
}

void write_paths_csv(const std::string& path, const PathSet& paths)
{
    if (paths.paths.empty())
        throw DomainError("no paths to write");
    const auto& t = paths.paths.front().grid->points;
    CsvWriter w(path);
    std::vector<std::string> h{"t"};
    for (std::size_t k = 0; k < paths.paths.size(); ++k)
        h.push_back("path_" + std::to_string(k));
    w.header(h);
    for (std::size_t i = 0; i < t.size(); ++i) {
        w.cell(t[i]);
        for (const auto& p : paths.paths)
            w.cell(p.values[i]);
        w.end_row();
    }
}

void write_wiener_hopf_csv(const std::string& path, const WienerHopfGrid& wh)
{
    CsvWriter w(path);
    w.header({"s", "t", "value"});
    for (std::size_t j = 0; j < wh.slice_times.size(); ++j)
        for (std::size_t i = 0; i < wh.nodes.size(); ++i) {
            w.cell(wh.slice_times[j] * wh.nodes[i]).cell(wh.slice_times[j]).cell(wh.l_values(j, i));
            w.end_row();
        }
}

void write_volterra_csv(const std::string& path, const VolterraGrid& vg)
{
    CsvWriter w(path);
    w.header({"s", "t", "value"});
    const auto& t = vg.grid.points;
    for (int m = 0; m < vg.grid.steps(); ++m)
        for (int i = 0; i <= m; ++i) {
            w.cell(t[i]).cell(t[m]).cell(vg.l_values(m, i));
            w.end_row();
        }
}

void write_json(const std::string& path, const nlohmann::json& j)
{
    auto f = open_file(path);
    *f << j.dump(2) << '\n';
    if (!*f)
        throw NumericalError("write failure: " + path);
}

void write_sidecar(const std::string& path, const nlohmann::json& meta)
{
    write_json(path + ".meta.json", meta);
}

} // namespace gfbm
