use codim_cat::corpus::{self, CORPUS};
use codim_cat::{parse_session, run_text, RunConfig};
use codimcat::limits::Limits;

fn quiet(jobs: usize) -> RunConfig {
    RunConfig {
        jobs,
        timing: false,
        ..RunConfig::default()
    }
}

#[test]
fn corpus_matches_golden_files() {
    for c in corpus::check(&RunConfig::default()) {
        assert!(c.matches_golden, "{} differs from its golden file:\n{}", c.name, c.output);
    }
}

#[test]
fn reports_do_not_depend_on_job_count() {
    for e in CORPUS {
        let one = run_text(e.session, &quiet(1)).render();
        for jobs in [2, 4] {
            assert_eq!(one, run_text(e.session, &quiet(jobs)).render(), "{} with {jobs} jobs", e.name);
        }
    }
}

#[test]
fn printed_sessions_parse_back() {
    let defaults = RunConfig::default().parse_defaults();
    for e in CORPUS {
        let s = parse_session(e.session, &defaults).unwrap();
        let again = parse_session(&s.to_string(), &defaults).unwrap();
        assert_eq!(s, again, "{}", e.name);
    }
}

#[test]
fn parse_error_reports_line_and_column() {
    let report = run_text("ring vars=[x,y]\nideal J = [x, y +* 2]\n", &quiet(1));
    assert!(!report.ok);
    let err = &report.json["errors"][0];
    assert_eq!(err["kind"], "Parse");
    assert_eq!(err["line"], 2);
    assert!(err["col"].as_u64().unwrap() > 1);
    assert_eq!(report.json["results"].as_array().unwrap().len(), 0);
}

#[test]
fn failed_command_leaves_others_intact() {
    let text = "ring vars=[x,y]\n\
                ideal I = [x^7 - y^5, x^3*y^2 - 1]\n\
                module M = quotient I\n\
                dim M\n\
                ideal J = [x]\n\
                dim J\n";
    let config = RunConfig {
        limits: Limits {
            max_degree: 5,
            ..Limits::default()
        },
        ..quiet(1)
    };
    let report = run_text(text, &config);
    assert!(!report.ok);
    let errors = report.json["errors"].as_array().unwrap();
    assert_eq!(errors.len(), 1);
    assert_eq!(errors[0]["kind"], "ResourceExceeded");
    assert_eq!(errors[0]["line"], 4);
    let results = report.json["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["dim"], 1);
}
