#include "cansys/cli.hpp"

#include "cansys/io.hpp"
#include "cansys/spectral.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace cansys {

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kVerificationFailure = 3;
constexpr int kInconclusive = 4;

Json report_header(const std::string& command) {
    Json j;
    j["schema"] = 1;
    j["command"] = command;
    return j;
}

void emit(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

Complex parse_complex_arg(const std::string& text) {
    std::istringstream in(text);
    double re = 0.0, im = 0.0;
    char comma = 0;
    if (!(in >> re >> comma >> im) || comma != ',')
        throw InputError("expected \"re,im\", got: " + text);
    return Complex(re, im);
}

std::pair<double, double> parse_range_arg(const std::string& text) {
    std::istringstream in(text);
    double lo = 0.0, hi = 0.0;
    char comma = 0;
    if (!(in >> lo >> comma >> hi) || comma != ',')
        throw InputError("expected \"lo,hi\", got: " + text);
    return {lo, hi};
}

void apply_tol_overrides(CanonicalSystem& s, const std::vector<std::string>& overrides) {
    for (const std::string& o : overrides) {
        auto eq = o.find('=');
        if (eq == std::string::npos) throw InputError("tolerance override must be key=value");
        std::string key = o.substr(0, eq);
        double value = std::stod(o.substr(eq + 1));
        if (key == "ode_rel")
            s.tol.ode_rel = value;
        else if (key == "ode_abs")
            s.tol.ode_abs = value;
        else if (key == "rank_tol")
            s.tol.rank_tol = value;
        else if (key == "green_tol")
            s.tol.green_tol = value;
        else if (key == "validation_grid")
            s.tol.validation_grid = static_cast<int>(value);
        else
            throw InputError("unknown tolerance key: " + key);
    }
}

Json validation_to_json(const ValidationReport& r) {
    Json j;
    j["valid"] = r.valid;
    j["J_skew_defect"] = r.j_skew_defect;
    j["J_unitary_defect"] = r.j_unitary_defect;
    j["B_hermiticity_defect"] = r.b_hermiticity;
    j["Delta_min_eigenvalue"] = r.delta_min_eigenvalue;
    j["pieces_tile"] = r.pieces_tile;
    if (!r.failure.empty()) j["failure"] = r.failure;
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j;
}

int cmd_validate(const CanonicalSystem& s, std::ostream& out) {
    Json j = report_header("validate");
    ValidationReport r = validate_system(s);
    j["report"] = validation_to_json(r);
    emit(out, j);
    return r.valid ? kOk : kInputError;
}

int cmd_signature(const CanonicalSystem& s, std::ostream& out) {
    Json j = report_header("signature");
    SignatureData sig = signature_decompose(s);
    j["nu_plus"] = sig.nu_plus;
    j["nu_minus"] = sig.nu_minus;
    j["delta"] = sig.delta;
    j["dim_H"] = sig.dim_h;
    j["dim_H_hat"] = sig.dim_h_hat;
    j["hamiltonian"] = sig.hamiltonian;
    j["U"] = matrix_to_json(sig.U);
    j["normal_form_residual"] = sig.normal_form_residual;
    emit(out, j);
    return kOk;
}

int cmd_indices(const CanonicalSystem& s, std::ostream& out) {
    Json j = report_header("indices");
    IndexBookkeeping ib = index_bookkeeping(s);
    Json formal;
    formal["method"] = ib.formal.method;
    formal["exact"] = ib.formal.exact;
    formal["conclusive"] = ib.formal.conclusive();
    if (ib.formal.conclusive()) {
        formal["N_plus"] = ib.formal.n_plus();
        formal["N_minus"] = ib.formal.n_minus();
    } else {
        formal["N_plus_range"] = Json::array({ib.formal.plus_lo, ib.formal.plus_hi});
        formal["N_minus_range"] = Json::array({ib.formal.minus_lo, ib.formal.minus_hi});
    }
    j["formal"] = formal;
    j["k_N"] = ib.k_n;
    if (ib.formal.conclusive()) {
        j["n_plus"] = ib.n_plus;
        j["n_minus"] = ib.n_minus;
    }
    j["nu_plus"] = ib.nu_plus;
    j["nu_minus"] = ib.nu_minus;
    j["nu_b_plus"] = ib.boundary.nu_b_plus;
    j["nu_b_minus"] = ib.boundary.nu_b_minus;
    if (ib.formal.exact) {
        j["sum_rule_signature"] = ib.sum_rule_signature;
        j["sum_rule_null_manifold"] = ib.sum_rule_null;
    }
    emit(out, j);
    return ib.formal.conclusive() ? kOk : kInconclusive;
}

int cmd_triplet(const CanonicalSystem& s, std::ostream& out) {
    Json j = report_header("triplet");
    DecomposingBoundary db = decomposing_triplet(s);
    j["is_triplet"] = db.is_triplet;
    j["dim_boundary"] = db.dim_boundary;
    j["G0"] = matrix_to_json(db.G0);
    j["G1"] = matrix_to_json(db.G1);
    j["U"] = matrix_to_json(db.sig.U);
    j["green_residual"] = db.green_residual;
    j["b_truncated"] = db.b_truncated;
    if (!db.is_triplet) {
        j["mul_dimension"] = db.mul_gamma.dim();
        j["mul_basis"] = matrix_to_json(db.mul_gamma.basis);
    }
    emit(out, j);
    return kOk;
}

int cmd_weyl(const CanonicalSystem& s, const std::vector<Complex>& lambdas,
             const std::string& out_csv, std::ostream& out) {
    Json j = report_header("weyl");
    Json samples = Json::array();
    double worst_conj = 0.0;
    double worst_nev = 0.0;
    std::ostringstream csv;
    bool csv_header_done = false;
    for (Complex l : lambdas) {
        WeylPoint w = weyl_function(s, l);
        Json sj;
        sj["lambda"] = Json::array({l.real(), l.imag()});
        sj["M"] = matrix_to_json(w.m);
        sj["condition"] = w.condition;
        sj["ill_conditioned"] = w.ill_conditioned;
        samples.push_back(std::move(sj));

        WeylPoint wc = weyl_function(s, std::conj(l));
        worst_conj = std::max(worst_conj, (wc.m - w.m.adjoint()).norm());
        double nev = min_eigenvalue_hermitian(Matrix(imaginary_part(w.m) / l.imag()));
        worst_nev = std::min(worst_nev, nev);

        if (!out_csv.empty()) {
            if (!csv_header_done) {
                csv << "lambda_re,lambda_im";
                for (Index r = 0; r < w.m.rows(); ++r)
                    for (Index c = 0; c < w.m.cols(); ++c)
                        csv << ",m_" << r << "_" << c << "_re,m_" << r << "_" << c << "_im";
                csv << "\n";
                csv_header_done = true;
            }
            csv << l.real() << "," << l.imag();
            csv.precision(17);
            for (Index r = 0; r < w.m.rows(); ++r)
                for (Index c = 0; c < w.m.cols(); ++c)
                    csv << "," << w.m(r, c).real() << "," << w.m(r, c).imag();
            csv << "\n";
        }
    }
    j["samples"] = samples;
    j["conjugation_symmetry_residual"] = worst_conj;
    j["nevanlinna_min_eigenvalue"] = worst_nev;
    if (!out_csv.empty()) {
        std::ofstream f(out_csv);
        if (!f) throw InputError("cannot open output file: " + out_csv);
        f << csv.str();
        j["csv"] = out_csv;
    }
    emit(out, j);
    return kOk;
}

int cmd_classify(const CanonicalSystem& s, const BoundaryCondition& bc,
                 bool require_self_adjoint, std::ostream& out) {
    Json j = report_header("classify-bc");
    if (bc.separated) {
        SeparatedReport r = classify_separated(s, bc, require_self_adjoint);
        j["class"] = to_string(r.cls);
        j["separated"] = true;
        j["S_a"] = matrix_to_json(r.Sa);
        j["S_b"] = matrix_to_json(r.Sb);
        j["dim_Ka"] = r.dim_ka;
        j["dim_Kb"] = r.dim_kb;
        j["dims_dissipative_ok"] = r.dims_dissipative_ok;
        j["dims_accumulative_ok"] = r.dims_accumulative_ok;
        if (r.hamiltonian_pairs_self_adjoint)
            j["hamiltonian_pairs_self_adjoint"] = *r.hamiltonian_pairs_self_adjoint;
        j["assembled_class"] = to_string(r.assembled_class);
        emit(out, j);
        return r.cls == ConditionClass::None ? kVerificationFailure : kOk;
    }
    ConditionReport r = classify_boundary_condition(s, bc);
    j["class"] = to_string(r.cls);
    j["separated"] = false;
    Json evs = Json::array();
    for (Index k = 0; k < r.d_eigenvalues.size(); ++k) evs.push_back(r.d_eigenvalues(k));
    j["D_eigenvalues"] = evs;
    j["routes"] = Json{{"sign", to_string(r.sign_route)},
                       {"pair", to_string(r.pair_route)},
                       {"form", to_string(r.form_route)}};
    if (require_self_adjoint && r.cls != ConditionClass::SelfAdjoint) {
        j["failure"] = "condition is not self-adjoint";
        emit(out, j);
        return kVerificationFailure;
    }
    emit(out, j);
    return r.cls == ConditionClass::None ? kVerificationFailure : kOk;
}

int cmd_spectrum(const CanonicalSystem& s, const BoundaryCondition& bc, double lo,
                 double hi, int grid, int max_count, std::ostream& out) {
    Json j = report_header("spectrum");
    SpectrumReport r = eigenvalues(s, bc, lo, hi, max_count, grid);
    Json vals = Json::array();
    for (const EigenvalueHit& h : r.values) {
        Json v;
        v["lambda"] = h.lambda;
        v["multiplicity"] = h.multiplicity;
        v["residual"] = h.residual;
        vals.push_back(std::move(v));
    }
    j["eigenvalues"] = vals;
    j["count"] = r.values.size();
    j["truncated"] = r.truncated;
    j["grid_points"] = r.grid_points;
    emit(out, j);
    return kOk;
}

int cmd_verify_relation(const Json& doc, std::ostream& out) {
    Json j = report_header("verify-relation");
    RelationDocument rd = relation_from_json(doc);
    BoundaryRelationReport r = verify_boundary_relation(rd.relation);
    j["valid"] = r.valid;
    j["domain_is_adjoint"] = r.domain_is_adjoint;
    j["kernel_is_base"] = r.kernel_is_base;
    j["green_residual"] = r.green_residual;
    j["dimension_identity"] = r.dimension_identity;
    if (!r.failure.empty()) j["failure"] = r.failure;
    if (r.valid) {
        MulStructure ms = multivalued_structure(rd.relation);
        j["mul_dimension"] = ms.n_gamma;
        j["dim_Kp"] = ms.Kp.dim();
        j["dim_Kpp"] = ms.Kpp.dim();
        DeficiencyData dd = deficiency_indices(rd.relation.base);
        j["n_plus"] = dd.n_plus;
        j["n_minus"] = dd.n_minus;
    }
    emit(out, j);
    return r.valid ? kOk : kVerificationFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"canonical-system boundary toolkit"};
    app.require_subcommand(1);

    std::string system_file, bc_file, relation_file, out_file;
    std::vector<std::string> lambda_args, tol_overrides;
    std::string range_arg;
    int grid = 1000;
    int max_count = 256;
    double sweep_im = 1.0;
    bool require_self_adjoint = false;

    auto add_system = [&](CLI::App* cmd) {
        cmd->add_option("--system", system_file, "system description (JSON)")->required();
        cmd->add_option("--tol", tol_overrides, "tolerance override key=value");
    };

    CLI::App* validate = app.add_subcommand("validate", "check system invariants");
    add_system(validate);
    CLI::App* signature = app.add_subcommand("signature", "signature normal form of J");
    add_system(signature);
    CLI::App* indices = app.add_subcommand("indices", "deficiency-index bookkeeping");
    add_system(indices);
    CLI::App* triplet = app.add_subcommand("triplet", "decomposing boundary maps");
    add_system(triplet);
    CLI::App* weyl = app.add_subcommand("weyl", "Weyl function samples");
    add_system(weyl);
    weyl->add_option("--lambda", lambda_args, "sample point re,im (repeatable)");
    weyl->add_option("--range", range_arg, "real sweep range lo,hi");
    weyl->add_option("--grid", grid, "sweep sample count");
    weyl->add_option("--im", sweep_im, "imaginary part for range sweeps");
    weyl->add_option("--out", out_file, "CSV output file for sweeps");
    CLI::App* classify = app.add_subcommand("classify-bc", "classify a boundary condition");
    add_system(classify);
    classify->add_option("--bc", bc_file, "boundary condition (JSON)")->required();
    classify->add_flag("--require-self-adjoint", require_self_adjoint,
                       "fail unless the condition is self-adjoint");
    CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues of a self-adjoint condition");
    add_system(spectrum);
    spectrum->add_option("--bc", bc_file, "boundary condition (JSON)")->required();
    spectrum->add_option("--range", range_arg, "search range lo,hi")->required();
    spectrum->add_option("--grid", grid, "scan grid points");
    spectrum->add_option("--max-count", max_count, "maximum reported eigenvalues");
    CLI::App* verify = app.add_subcommand("verify-relation", "verify an abstract boundary relation");
    verify->add_option("--relation", relation_file, "relation description (JSON)")->required();

    std::vector<std::string> argv_copy = args;
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>("cansys-cli"));
    for (std::string& a : argv_copy) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help and friends
            err << app.help();
            return kOk;
        }
        err << "error: " << e.what() << "\n";
        return kInputError;
    }

    try {
        if (*verify) {
            return cmd_verify_relation(load_json_file(relation_file), out);
        }
        CanonicalSystem s = system_from_json(load_json_file(system_file));
        apply_tol_overrides(s, tol_overrides);
        if (*validate) return cmd_validate(s, out);
        require_valid(s);
        if (*signature) return cmd_signature(s, out);
        if (*indices) return cmd_indices(s, out);
        if (*triplet) return cmd_triplet(s, out);
        if (*weyl) {
            std::vector<Complex> lambdas;
            for (const std::string& l : lambda_args) lambdas.push_back(parse_complex_arg(l));
            if (!range_arg.empty()) {
                auto [lo, hi] = parse_range_arg(range_arg);
                int count = std::max(grid, 2);
                for (int k = 0; k < count; ++k)
                    lambdas.push_back(Complex(lo + (hi - lo) * k / (count - 1), sweep_im));
            }
            if (lambdas.empty())
                throw InputError("weyl: provide --lambda samples or a --range sweep");
            return cmd_weyl(s, lambdas, out_file, out);
        }
        if (*classify) {
            BoundaryCondition bc = condition_from_json(load_json_file(bc_file));
            return cmd_classify(s, bc, require_self_adjoint, out);
        }
        if (*spectrum) {
            BoundaryCondition bc = condition_from_json(load_json_file(bc_file));
            if (bc.separated) bc = assemble_separated(s, *bc.separated);
            auto [lo, hi] = parse_range_arg(range_arg);
            return cmd_spectrum(s, bc, lo, hi, grid, max_count, out);
        }
    } catch (const InputError& e) {
        Json j;
        j["schema"] = 1;
        j["error"] = e.what();
        emit(out, j);
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const VerificationError& e) {
        Json j;
        j["schema"] = 1;
        j["error"] = e.what();
        emit(out, j);
        err << "verification failure: " << e.what() << "\n";
        return kVerificationFailure;
    } catch (const ToleranceError& e) {
        Json j;
        j["schema"] = 1;
        j["error"] = e.what();
        emit(out, j);
        err << "inconclusive: " << e.what() << "\n";
        return kInconclusive;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kVerificationFailure;
    }
    err << "error: no command executed\n";
    return kInputError;
}

}  // namespace cansys
