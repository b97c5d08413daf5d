#pragma once

#include "gfbm/girsanov.hpp"
#include "gfbm/simulate.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace gfbm {

// 17 significant digits: lossless for doubles.
std::string format_double(double x);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    explicit CsvWriter(std::ostream& out);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void header(const std::vector<std::string>& names);
    CsvWriter& cell(double x);
    CsvWriter& cell(long long x);
    CsvWriter& cell(const std::string& s);
    void end_row();

private:
    std::ostream* out_;
    std::unique_ptr<std::ostream> owned_;
    bool first_ = true;
};

// t,path_0,...,path_{n-1}
void write_paths_csv(const std::string& path, const PathSet& paths);
// s,t,value over the slice nodes
void write_wiener_hopf_csv(const std::string& path, const WienerHopfGrid& wh);
// s,t,value for t_i <= t_m on the path grid
void write_volterra_csv(const std::string& path, const VolterraGrid& vg);

void write_json(const std::string& path, const nlohmann::json& j);
// Sidecar at path + ".meta.json".
void write_sidecar(const std::string& path, const nlohmann::json& meta);

} // namespace gfbm
