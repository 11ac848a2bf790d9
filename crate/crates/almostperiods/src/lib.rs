//! JSON formats, job runner and property suites for the `almostperiods`
//! command line tool. The mathematics lives in `almostperiods-core`.

pub mod jobs;
pub mod json;
pub mod suites;
