#include "cscoop/driver.hpp"

#include <fstream>
#include <sstream>

namespace cscoop {

CompileResult compile_text(const std::string &text, const std::string &path,
                           const LowerOptions &options) {
    CompileResult res;
    res.diags.set_path(path);
    SourceUnit unit(path, text);
    std::vector<Token> tokens = tokenize(unit, res.diags);
    if (res.diags.has_errors()) return res;
    res.tree = parse(tokens, res.diags);
    if (res.diags.has_errors()) return res;
    res.env = collect_types(res.tree, res.diags);
    if (res.diags.has_errors()) return res;
    if (!check(res.tree, res.env, res.diags)) return res;
    res.program = lower_program(res.tree, options);
    return res;
}

CompileResult compile_file(const std::string &path, const LowerOptions &options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        CompileResult res;
        res.diags.error(path, SourcePos{}, "cannot open file");
        return res;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return compile_text(buf.str(), path, options);
}

} // namespace cscoop
