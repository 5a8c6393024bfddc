#include "cscoop/export.hpp"

#include <cassert>
#include <cstdlib>
#include <set>
#include <sstream>

namespace cscoop {

namespace {

std::string dot_escape(const std::string &s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out.push_back('\\');
        out.push_back(ch);
    }
    return out;
}

std::string xml_escape(const std::string &s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(ch);
        }
    }
    return out;
}

std::string place_text(const Place &p) {
    if (p.is_attr) return "attr " + std::to_string(p.attr_index);
    switch (p.var.space) {
    case VarSpace::Local: return "local " + std::to_string(p.var.index);
    case VarSpace::Formal: return "formal " + std::to_string(p.var.index);
    case VarSpace::ResultVar: return "result";
    }
    return "?";
}

} // namespace

std::string encode_value(const Value &v) {
    switch (v.kind) {
    case Value::Kind::Void: return "void";
    case Value::Kind::Int: return "int " + std::to_string(v.i);
    case Value::Kind::Bool: return v.b ? "bool true" : "bool false";
    case Value::Kind::Ref:
        return "ref p" + std::to_string(v.pid) + " o" + std::to_string(v.oid);
    }
    return "void";
}

Value decode_value(const std::string &s) {
    std::istringstream in(s);
    std::string tag;
    in >> tag;
    if (tag == "int") {
        std::int64_t v = 0;
        in >> v;
        return Value::of_int(v);
    }
    if (tag == "bool") {
        std::string b;
        in >> b;
        return Value::of_bool(b == "true");
    }
    if (tag == "ref") {
        std::string p, o;
        in >> p >> o;
        return Value::of_ref(static_cast<Pid>(std::strtoul(p.c_str() + 1, nullptr, 10)),
                             static_cast<Oid>(std::strtoul(o.c_str() + 1, nullptr, 10)));
    }
    return Value::void_value();
}

// ---------------------------------------------------------------------------
// DOT

std::string export_dot(const Program &p) {
    std::ostringstream out;
    for (const auto &[cls, table] : p.methods) {
        for (const auto &[name, g] : table) {
            out << "digraph \"" << dot_escape(cls + "::" + name) << "\" {\n";
            out << "  rankdir=LR;\n";
            out << "  node [shape=circle, fontsize=10];\n";
            std::set<int> nodes;
            for (const ActionEdge &e : g.edges) {
                nodes.insert(e.from);
                nodes.insert(e.to);
            }
            nodes.insert(g.entry);
            for (int n : nodes) {
                out << "  n" << n;
                if (g.is_final(n))
                    out << " [shape=doublecircle]";
                else if (n == g.entry)
                    out << " [style=bold]";
                out << ";\n";
            }
            for (const ActionEdge &e : g.edges)
                out << "  n" << e.from << " -> n" << e.to << " [label=\""
                    << dot_escape(e.action.label()) << "\"];\n";
            out << "}\n";
        }
    }
    return out.str();
}

std::string export_dot(const Configuration &c) {
    std::ostringstream out;
    out << "digraph configuration {\n";
    out << "  compound=true;\n";
    out << "  node [fontsize=10];\n";
    for (const auto &[pid, proc] : c.procs) {
        out << "  subgraph cluster_p" << pid << " {\n";
        out << "    label=\"p" << pid << (pid == c.root_pid ? " (root)" : "") << "\";\n";
        out << "    p" << pid << "_anchor [shape=point, style=invis];\n";
        for (const auto &[oid, obj] : proc.objects) {
            std::string label = "o" + std::to_string(oid) + ": " + obj.cls;
            const ClassLayout *layout = c.program->find_class(obj.cls);
            for (std::size_t i = 0; i < obj.attrs.size(); ++i) {
                label += "\\n";
                label += layout ? layout->attributes[i].name : ("a" + std::to_string(i));
                label += " = " + value_text(obj.attrs[i]);
            }
            out << "    p" << pid << "_o" << oid << " [shape=box, label=\""
                << dot_escape(label) << "\"];\n";
        }
        for (std::size_t i = 0; i < proc.stack.size(); ++i) {
            const Frame &f = proc.stack[i];
            out << "    p" << pid << "_f" << i << " [shape=ellipse, label=\""
                << dot_escape(f.graph->class_name + "::" + f.graph->method_name + " @" +
                              std::to_string(f.node))
                << "\"];\n";
        }
        out << "  }\n";
    }
    for (const auto &[pid, proc] : c.procs) {
        for (std::size_t i = 0; i < proc.stack.size(); ++i) {
            const Frame &f = proc.stack[i];
            out << "  p" << pid << "_f" << i << " -> p" << pid << "_o" << f.target_oid
                << " [style=dotted];\n";
            for (Pid l : f.locks)
                out << "  p" << pid << "_f" << i << " -> p" << l
                    << "_anchor [label=\"lock\", color=red, lhead=cluster_p" << l << "];\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::string export_dot(const StateSpace &space) {
    std::ostringstream out;
    out << "digraph states {\n";
    out << "  node [shape=circle, fontsize=10];\n";
    for (const StateNode &n : space.nodes) {
        out << "  s" << n.id << " [";
        if (n.violating) {
            out << "style=filled, fillcolor=red, label=\"s" << n.id << "\\n"
                << dot_escape(n.note) << "\"";
        } else {
            out << "label=\"s" << n.id << "\"";
            if (n.terminal) out << ", shape=doublecircle";
            if (n.initial) out << ", style=bold";
        }
        out << "];\n";
    }
    for (const StateEdge &e : space.edges)
        out << "  s" << e.from << " -> s" << e.to << " [label=\"" << dot_escape(e.label)
            << "\"];\n";
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// GXL. Self-describing typed graph; see docs/gxl.md for the vocabulary.

namespace {

struct Gxl {
    std::ostringstream out;
    std::set<std::string> state_nodes;

    void attr(const std::string &name, const std::string &v) {
        out << "      <attr name=\"" << name << "\"><string>" << xml_escape(v)
            << "</string></attr>\n";
    }
    void attr(const std::string &name, std::int64_t v) {
        out << "      <attr name=\"" << name << "\"><int>" << v << "</int></attr>\n";
    }
    void attr(const std::string &name, bool v) {
        out << "      <attr name=\"" << name << "\"><bool>" << (v ? "true" : "false")
            << "</bool></attr>\n";
    }
    void open_node(const std::string &id, const std::string &type) {
        out << "    <node id=\"" << id << "\">\n";
        out << "      <type xlink:href=\"#" << type << "\"/>\n";
    }
    void close_node() { out << "    </node>\n"; }
    void edge(const std::string &from, const std::string &to, const std::string &type) {
        out << "    <edge from=\"" << from << "\" to=\"" << to << "\">\n";
        out << "      <type xlink:href=\"#" << type << "\"/>\n";
        out << "    </edge>\n";
    }

    // CFG location nodes are shared between frames sitting at the same spot.
    std::string state_node(const MethodGraph *g, int node) {
        std::string id = "st." + g->class_name + "." + g->method_name + ".n" +
                         std::to_string(node);
        if (state_nodes.insert(id).second) {
            open_node(id, "state");
            attr("class", g->class_name);
            attr("method", g->method_name);
            attr("node", static_cast<std::int64_t>(node));
            close_node();
        }
        return id;
    }
};

} // namespace

std::string export_gxl(const Configuration &c) {
    Gxl g;
    g.out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    g.out << "<gxl xmlns:xlink=\"http://www.w3.org/1999/xlink\">\n";
    g.out << "  <graph id=\"configuration\" edgemode=\"directed\">\n";
    {
        std::ostringstream fp;
        fp << std::hex << c.program->fingerprint;
        g.out << "    <attr name=\"program\"><string>" << fp.str()
              << "</string></attr>\n";
    }
    g.out << "    <attr name=\"discipline\"><string>"
          << (c.discipline == QueueDiscipline::Fifo ? "fifo" : "bag")
          << "</string></attr>\n";
    g.out << "    <attr name=\"root\"><string>p" << c.root_pid << "</string></attr>\n";
    if (c.error) {
        g.out << "    <attr name=\"error_kind\"><string>" << error_kind_name(c.error.kind)
              << "</string></attr>\n";
        g.out << "    <attr name=\"error_proc\"><string>p" << c.error.pid
              << "</string></attr>\n";
        g.out << "    <attr name=\"error_line\"><int>" << c.error.pos.line
              << "</int></attr>\n";
        g.out << "    <attr name=\"error_column\"><int>" << c.error.pos.column
              << "</int></attr>\n";
        g.out << "    <attr name=\"error_detail\"><string>" << xml_escape(c.error.detail)
              << "</string></attr>\n";
    }

    for (const auto &[pid, proc] : c.procs) {
        std::string pnode = "p" + std::to_string(pid);
        g.open_node(pnode, "processor");
        if (proc.waiting) g.attr("waiting", place_text(*proc.waiting));
        g.close_node();

        for (const auto &[oid, obj] : proc.objects) {
            std::string onode = pnode + ".o" + std::to_string(oid);
            g.open_node(onode, "object");
            g.attr("class", obj.cls);
            const ClassLayout *layout = c.program->find_class(obj.cls);
            for (std::size_t i = 0; i < obj.attrs.size(); ++i) {
                std::string name =
                    layout ? layout->attributes[i].name : ("a" + std::to_string(i));
                g.attr(name, encode_value(obj.attrs[i]));
            }
            g.close_node();
            g.edge(onode, pnode, "handler");
        }

        for (std::size_t i = 0; i < proc.stack.size(); ++i) {
            const Frame &f = proc.stack[i];
            std::string fnode = pnode + ".f" + std::to_string(i);
            g.open_node(fnode, "frame");
            g.attr("class", f.graph->class_name);
            g.attr("method", f.graph->method_name);
            g.attr("index", static_cast<std::int64_t>(i));
            g.attr("target", static_cast<std::int64_t>(f.target_oid));
            g.attr("node", static_cast<std::int64_t>(f.node));
            for (std::size_t k = 0; k < f.formals.size(); ++k)
                g.attr("formal" + std::to_string(k), encode_value(f.formals[k]));
            for (std::size_t k = 0; k < f.locals.size(); ++k)
                g.attr("local" + std::to_string(k), encode_value(f.locals[k]));
            g.attr("result", encode_value(f.result));
            if (f.query_caller) g.attr("caller", "p" + std::to_string(*f.query_caller));
            g.close_node();
            std::string snode = g.state_node(f.graph, f.node);
            g.edge(fnode, snode, "current_state");
            for (Pid l : f.locks) g.edge(fnode, "p" + std::to_string(l), "lock");
        }

        for (std::size_t i = 0; i < proc.queue.size(); ++i) {
            const Request &r = proc.queue[i];
            std::string qnode = pnode + ".q" + std::to_string(i);
            g.open_node(qnode, "request");
            g.attr("index", static_cast<std::int64_t>(i));
            g.attr("method", r.method);
            g.attr("target", static_cast<std::int64_t>(r.target_oid));
            g.attr("query", r.is_query);
            if (r.caller != 0) g.attr("caller", "p" + std::to_string(r.caller));
            for (std::size_t k = 0; k < r.args.size(); ++k)
                g.attr("arg" + std::to_string(k), encode_value(r.args[k]));
            g.close_node();
            g.edge(pnode, qnode, "queued");
        }
    }

    g.out << "  </graph>\n";
    g.out << "</gxl>\n";
    return g.out.str();
}

} // namespace cscoop
