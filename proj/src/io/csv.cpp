#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "segtransfer/io/formats.hpp"

namespace segtransfer::io {

namespace {

// shortest representation that round-trips a double
std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double parsed = 0.0;
    std::sscanf(buf, "%lf", &parsed);
    if (parsed == v) {
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[32];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            std::sscanf(shorter, "%lf", &parsed);
            if (parsed == v) return shorter;
        }
    }
    return buf;
}

}  // namespace

void write_segment_csv(const std::filesystem::path& path,
                       std::span<const SegmentRecord> records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        raise(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out << "image_id,segment_index,domain,pred_class,segment_iou,is_error";
    for (auto name : FeatureRegistry::names()) out << ',' << name;
    out << '\n';
    for (const auto& rec : records) {
        out << rec.image_id << ',' << rec.segment_index << ','
            << domain_name(rec.domain) << ',' << rec.cls << ','
            << format_double(rec.segment_iou) << ','
            << (rec.is_error ? 1 : 0);
        for (double f : rec.features) out << ',' << format_double(f);
        out << '\n';
    }
    if (!out) raise(ErrorCode::Io, "failed writing " + path.string());
}

std::vector<SegmentRecord> read_segment_csv(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        raise(ErrorCode::MissingFile, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        raise(ErrorCode::CorruptFile, path.string() + ": empty table");

    auto split = [](const std::string& s) {
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const std::size_t pos = s.find(',', start);
            if (pos == std::string::npos) {
                fields.push_back(s.substr(start));
                return fields;
            }
            fields.push_back(s.substr(start, pos - start));
            start = pos + 1;
        }
    };

    const auto header = split(line);
    const std::size_t expected = 6 + FeatureRegistry::kCount;
    if (header.size() != expected)
        raise(ErrorCode::CorruptFile,
              path.string() + ": expected " + std::to_string(expected) +
                  " columns, found " + std::to_string(header.size()));
    for (int f = 0; f < FeatureRegistry::kCount; ++f)
        if (header[6 + f] != FeatureRegistry::name(f))
            raise(ErrorCode::Registry,
                  path.string() + ": column " + header[6 + f] +
                      " does not match registry feature " +
                      std::string(FeatureRegistry::name(f)));

    std::vector<SegmentRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != expected)
            raise(ErrorCode::CorruptFile,
                  path.string() + ":" + std::to_string(line_no) +
                      ": wrong column count");
        SegmentRecord rec;
        rec.image_id = fields[0];
        rec.segment_index = std::stoi(fields[1]);
        rec.domain = domain_from_name(fields[2]);
        rec.cls = std::stoi(fields[3]);
        rec.segment_iou = std::stod(fields[4]);
        rec.is_error = fields[5] == "1";
        for (int f = 0; f < FeatureRegistry::kCount; ++f)
            rec.features[f] = std::stod(fields[6 + f]);
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace segtransfer::io
