#include "cansys/io.hpp"

#include <fstream>

namespace cansys {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw InputError(path + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "/" + key, "missing field");
    return *it;
}

double number(const Json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

Complex complex_entry(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) fail(path, "complex entries are [re, im] pairs");
    return Complex(number(j[0], path + "/0"), number(j[1], path + "/1"));
}

MatrixPolynomial poly_from_json(const Json& j, Index n, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of matrices");
    MatrixPolynomial p;
    for (size_t k = 0; k < j.size(); ++k) {
        Matrix c = matrix_from_json(j[k], path + "/" + std::to_string(k));
        if (c.rows() != n || c.cols() != n)
            fail(path + "/" + std::to_string(k), "coefficient matrix must be n x n");
        p.coeffs.push_back(std::move(c));
    }
    return p;
}

Json poly_to_json(const MatrixPolynomial& p) {
    Json out = Json::array();
    for (const Matrix& c : p.coeffs) out.push_back(matrix_to_json(c));
    return out;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j)
            row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of rows");
    const Index rows = static_cast<Index>(j.size());
    Index cols = -1;
    Matrix m;
    for (Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<size_t>(i)];
        std::string rpath = path + "/" + std::to_string(i);
        if (!row.is_array()) fail(rpath, "expected a row array");
        if (cols < 0) {
            cols = static_cast<Index>(row.size());
            m.resize(rows, cols);
        }
        if (static_cast<Index>(row.size()) != cols) fail(rpath, "ragged matrix rows");
        for (Index k = 0; k < cols; ++k)
            m(i, k) = complex_entry(row[static_cast<size_t>(k)],
                                    rpath + "/" + std::to_string(k));
    }
    if (rows == 0) m.resize(0, 0);
    return m;
}

CanonicalSystem system_from_json(const Json& j) {
    CanonicalSystem s;
    if (field(j, "schema", "").get<int>() != 1) fail("/schema", "unsupported schema version");
    s.n = field(j, "n", "").get<Index>();
    const Json& iv = field(j, "interval", "");
    if (!iv.is_array() || iv.size() != 2) fail("/interval", "expected [a, b]");
    s.a = number(iv[0], "/interval/0");
    s.b = number(iv[1], "/interval/1");

    const Json& ek = field(j, "endpoint_b", "");
    if (ek.is_string() && ek.get<std::string>() == "regular") {
        s.b_kind = EndpointKind::Regular;
    } else if (ek.is_object() && ek.contains("truncated")) {
        s.b_kind = EndpointKind::TruncatedSingular;
        const Json& tb = field(ek["truncated"], "true_b", "/endpoint_b/truncated");
        if (tb.is_string() && tb.get<std::string>() == "inf") {
            s.true_b_infinite = true;
        } else {
            s.true_b = number(tb, "/endpoint_b/truncated/true_b");
        }
    } else {
        fail("/endpoint_b", "expected \"regular\" or {\"truncated\": {\"true_b\": ...}}");
    }

    s.J = matrix_from_json(field(j, "J", ""), "/J");
    const Json& pieces = field(j, "pieces", "");
    if (!pieces.is_array() || pieces.empty()) fail("/pieces", "expected a nonempty array");
    for (size_t k = 0; k < pieces.size(); ++k) {
        std::string ppath = "/pieces/" + std::to_string(k);
        const Json& pj = pieces[k];
        Piece p;
        p.t0 = number(field(pj, "t0", ppath), ppath + "/t0");
        p.t1 = number(field(pj, "t1", ppath), ppath + "/t1");
        p.b = poly_from_json(field(pj, "B", ppath), s.n, ppath + "/B");
        p.delta = poly_from_json(field(pj, "Delta", ppath), s.n, ppath + "/Delta");
        s.pieces.push_back(std::move(p));
    }

    if (j.contains("tolerances")) {
        const Json& t = j["tolerances"];
        if (!t.is_object()) fail("/tolerances", "expected an object");
        if (t.contains("ode_rel")) s.tol.ode_rel = number(t["ode_rel"], "/tolerances/ode_rel");
        if (t.contains("ode_abs")) s.tol.ode_abs = number(t["ode_abs"], "/tolerances/ode_abs");
        if (t.contains("rank_tol"))
            s.tol.rank_tol = number(t["rank_tol"], "/tolerances/rank_tol");
        if (t.contains("green_tol"))
            s.tol.green_tol = number(t["green_tol"], "/tolerances/green_tol");
        if (t.contains("validation_grid"))
            s.tol.validation_grid = t["validation_grid"].get<int>();
    }
    return s;
}

Json system_to_json(const CanonicalSystem& s) {
    Json j;
    j["schema"] = 1;
    j["n"] = s.n;
    j["interval"] = Json::array({s.a, s.b});
    if (s.b_kind == EndpointKind::Regular) {
        j["endpoint_b"] = "regular";
    } else {
        Json tb;
        if (s.true_b_infinite)
            tb["true_b"] = "inf";
        else
            tb["true_b"] = s.true_b;
        j["endpoint_b"] = Json{{"truncated", tb}};
    }
    j["J"] = matrix_to_json(s.J);
    Json pieces = Json::array();
    for (const Piece& p : s.pieces) {
        Json pj;
        pj["t0"] = p.t0;
        pj["t1"] = p.t1;
        pj["B"] = poly_to_json(p.b);
        pj["Delta"] = poly_to_json(p.delta);
        pieces.push_back(std::move(pj));
    }
    j["pieces"] = std::move(pieces);
    return j;
}

BoundaryCondition condition_from_json(const Json& j) {
    if (field(j, "schema", "").get<int>() != 1) fail("/schema", "unsupported schema version");
    BoundaryCondition bc;
    if (j.contains("separated")) {
        const Json& sj = j["separated"];
        const Json& aj = field(sj, "a", "/separated");
        const Json& bj = field(sj, "b", "/separated");
        SeparatedBlocks blocks;
        blocks.N0a = matrix_from_json(field(aj, "N0", "/separated/a"), "/separated/a/N0");
        blocks.N1a = matrix_from_json(field(aj, "N1", "/separated/a"), "/separated/a/N1");
        blocks.Nhat_a = aj.contains("Nhat")
                            ? matrix_from_json(aj["Nhat"], "/separated/a/Nhat")
                            : Matrix::Zero(blocks.N0a.rows(), 0);
        blocks.N0b = matrix_from_json(field(bj, "N0", "/separated/b"), "/separated/b/N0");
        blocks.N1b = matrix_from_json(field(bj, "N1", "/separated/b"), "/separated/b/N1");
        blocks.Nhat_b = bj.contains("Nhat")
                            ? matrix_from_json(bj["Nhat"], "/separated/b/Nhat")
                            : Matrix::Zero(blocks.N0b.rows(), 0);
        bc.separated = std::move(blocks);
        return bc;
    }
    bc.Ca = matrix_from_json(field(j, "Ca", ""), "/Ca");
    bc.Cb = matrix_from_json(field(j, "Cb", ""), "/Cb");
    if (j.contains("Jb")) bc.Jb = matrix_from_json(j["Jb"], "/Jb");
    return bc;
}

Json condition_to_json(const BoundaryCondition& bc) {
    Json j;
    j["schema"] = 1;
    if (bc.separated) {
        Json a, b;
        a["N0"] = matrix_to_json(bc.separated->N0a);
        a["Nhat"] = matrix_to_json(bc.separated->Nhat_a);
        a["N1"] = matrix_to_json(bc.separated->N1a);
        b["N0"] = matrix_to_json(bc.separated->N0b);
        b["Nhat"] = matrix_to_json(bc.separated->Nhat_b);
        b["N1"] = matrix_to_json(bc.separated->N1b);
        j["separated"] = Json{{"a", a}, {"b", b}};
        return j;
    }
    j["Ca"] = matrix_to_json(bc.Ca);
    j["Cb"] = matrix_to_json(bc.Cb);
    if (bc.Jb) j["Jb"] = matrix_to_json(*bc.Jb);
    return j;
}

RelationDocument relation_from_json(const Json& j) {
    if (field(j, "schema", "").get<int>() != 1) fail("/schema", "unsupported schema version");
    Index d = field(j, "dim", "").get<Index>();
    Matrix a_span = matrix_from_json(field(j, "A", ""), "/A");
    if (a_span.rows() != 2 * d) fail("/A", "graph vectors must have length 2*dim");
    LinearRelation base = LinearRelation::from_span(d, d, a_span);

    RelationDocument doc;
    if (j.contains("Gamma")) {
        Index h0 = field(j, "h0", "").get<Index>();
        Index h1 = field(j, "h1", "").get<Index>();
        Matrix g_span = matrix_from_json(j["Gamma"], "/Gamma");
        if (g_span.rows() != 2 * d + h0 + h1)
            fail("/Gamma", "graph vectors must have length 2*dim + h0 + h1");
        LinearRelation gamma = LinearRelation::from_span(2 * d, h0 + h1, g_span);
        doc.relation = make_boundary_relation(std::move(base), std::move(gamma),
                                              BoundarySpacePair{h0, h1});
        return doc;
    }
    if (!j.contains("assembled"))
        fail("", "expected either a Gamma graph or assembled triplet data");
    const Json& aj = j["assembled"];
    Matrix g0 = matrix_from_json(field(aj, "G0", "/assembled"), "/assembled/G0");
    Matrix g1 = matrix_from_json(field(aj, "G1", "/assembled"), "/assembled/G1");
    Matrix basis;
    if (aj.contains("adjoint_basis")) {
        basis = matrix_from_json(aj["adjoint_basis"], "/assembled/adjoint_basis");
    } else {
        basis = adjoint(base).graph.basis;
    }
    BoundarySpacePair spaces{g0.rows(), g1.rows()};
    BoundaryTriplet t = make_triplet(base, basis, spaces, g0, g1);
    Matrix f2 = aj.contains("F2") ? matrix_from_json(aj["F2"], "/assembled/F2")
                                  : Matrix::Zero(spaces.h2(), 0);
    Matrix f1 = aj.contains("F1") ? matrix_from_json(aj["F1"], "/assembled/F1")
                                  : Matrix::Zero(spaces.h1, 0);
    Matrix fp = aj.contains("Fp") ? matrix_from_json(aj["Fp"], "/assembled/Fp")
                                  : Matrix::Zero(0, 0);
    Index kpp = aj.contains("kpp") ? aj["kpp"].get<Index>() : 0;
    doc.relation = assemble(t, f2, f1, fp, kpp);
    return doc;
}

Json load_json_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw InputError("cannot open file: " + filename);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError(filename + ": " + e.what());
    }
    return j;
}

}  // namespace cansys
