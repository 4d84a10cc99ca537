#include <cstdio>

#include "json.hpp"

#include "sortscale/bench.hpp"

namespace sortscale {

using nlohmann::json;

namespace {

json phases_to_json(const PhaseTimings& p) {
    return json{{"predict_ns", p.t_predict},
                {"assign_ns", p.t_assign},
                {"update_ns", p.t_update},
                {"spawn_ns", p.t_spawn},
                {"output_ns", p.t_output}};
}

PhaseTimings phases_from_json(const json& j) {
    PhaseTimings p;
    p.t_predict = j.at("predict_ns").get<std::uint64_t>();
    p.t_assign = j.at("assign_ns").get<std::uint64_t>();
    p.t_update = j.at("update_ns").get<std::uint64_t>();
    p.t_spawn = j.at("spawn_ns").get<std::uint64_t>();
    p.t_output = j.at("output_ns").get<std::uint64_t>();
    return p;
}

json model_to_json(const TimingModel& m) {
    return json{{"a", m.a},
                {"b", m.b},
                {"c", m.c},
                {"d", m.d},
                {"residual_rms_ns", m.residual_rms_ns},
                {"degenerate", m.degenerate}};
}

TimingModel model_from_json(const json& j) {
    TimingModel m;
    m.a = j.at("a").get<double>();
    m.b = j.at("b").get<double>();
    m.c = j.at("c").get<double>();
    m.d = j.at("d").get<double>();
    m.residual_rms_ns = j.at("residual_rms_ns").get<double>();
    m.degenerate = j.at("degenerate").get<bool>();
    return m;
}

}  // namespace

const char* const kReportCsvHeader =
    "mode,cores,files,frames,fps,replication,wall_seconds,"
    "predict_ns,assign_ns,update_ns,spawn_ns,output_ns,"
    "model_a,model_b,model_c,model_d,model_residual_rms_ns,model_degenerate,"
    "timer_overhead_ns,parse_seconds,write_seconds,partial,schema_version";

std::string report_to_string(const BenchReport& br, ReportFormat format) {
    if (format == ReportFormat::Json) {
        json j{{"schema_version", br.schema_version},
               {"mode", br.mode},
               {"cores", br.cores},
               {"files", br.files},
               {"frames", br.frames},
               {"replication", br.replication},
               {"fps", br.fps},
               {"wall_seconds", br.wall_seconds},
               {"phases", phases_to_json(br.phases)},
               {"model", model_to_json(br.model)},
               {"timer_overhead_ns", br.timer_overhead_ns},
               {"parse_seconds", br.parse_seconds},
               {"write_seconds", br.write_seconds},
               {"partial", br.partial}};
        json children = json::array();
        for (const ChildReport& c : br.children) {
            children.push_back(json{{"index", c.index},
                                    {"frames", c.frames},
                                    {"fps", c.fps},
                                    {"wall_seconds", c.wall_seconds},
                                    {"exit_code", c.exit_code}});
        }
        j["children"] = std::move(children);
        return j.dump(2) + "\n";
    }

    char buf[1024];
    std::snprintf(buf, sizeof(buf),
                  "%s,%d,%d,%lld,%.17g,%d,%.17g,"
                  "%llu,%llu,%llu,%llu,%llu,"
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%d,"
                  "%.17g,%.17g,%.17g,%d,%d\n",
                  br.mode.c_str(), br.cores, br.files, br.frames, br.fps, br.replication,
                  br.wall_seconds, static_cast<unsigned long long>(br.phases.t_predict),
                  static_cast<unsigned long long>(br.phases.t_assign),
                  static_cast<unsigned long long>(br.phases.t_update),
                  static_cast<unsigned long long>(br.phases.t_spawn),
                  static_cast<unsigned long long>(br.phases.t_output), br.model.a, br.model.b,
                  br.model.c, br.model.d, br.model.residual_rms_ns,
                  br.model.degenerate ? 1 : 0, br.timer_overhead_ns, br.parse_seconds,
                  br.write_seconds, br.partial ? 1 : 0, br.schema_version);
    return std::string(kReportCsvHeader) + "\n" + buf;
}

BenchReport report_from_json(const std::string& text) {
    const json j = json::parse(text);
    BenchReport br;
    br.schema_version = j.at("schema_version").get<int>();
    br.mode = j.at("mode").get<std::string>();
    br.cores = j.at("cores").get<int>();
    br.files = j.at("files").get<int>();
    br.frames = j.at("frames").get<long long>();
    br.replication = j.at("replication").get<int>();
    br.fps = j.at("fps").get<double>();
    br.wall_seconds = j.at("wall_seconds").get<double>();
    br.phases = phases_from_json(j.at("phases"));
    br.model = model_from_json(j.at("model"));
    br.timer_overhead_ns = j.at("timer_overhead_ns").get<double>();
    br.parse_seconds = j.at("parse_seconds").get<double>();
    br.write_seconds = j.at("write_seconds").get<double>();
    br.partial = j.at("partial").get<bool>();
    for (const json& c : j.at("children")) {
        ChildReport cr;
        cr.index = c.at("index").get<int>();
        cr.frames = c.at("frames").get<long long>();
        cr.fps = c.at("fps").get<double>();
        cr.wall_seconds = c.at("wall_seconds").get<double>();
        cr.exit_code = c.at("exit_code").get<int>();
        br.children.push_back(cr);
    }
    return br;
}

}  // namespace sortscale
