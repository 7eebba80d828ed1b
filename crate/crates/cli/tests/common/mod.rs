#![allow(dead_code)]

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_transitmap"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary starts")
}

pub fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Two tram routes sharing a trunk a-b-c, then branching to d and e.
pub fn write_minimal_feed(dir: &Path) {
    let files = [
        ("agency.txt", "agency_id,agency_name,agency_url,agency_timezone\nx,X,http://x.invalid,Europe/Berlin\n"),
        (
            "stops.txt",
            "stop_id,stop_name,stop_lat,stop_lon
a,Alpha,48.000,7.800
b,Beta,48.000,7.810
c,Gamma,48.000,7.820
d,Delta,48.008,7.820
e,Epsilon,47.992,7.820
",
        ),
        ("routes.txt", "route_id,agency_id,route_short_name,route_long_name,route_type,route_color\n1,x,1,,0,FF0000\n2,x,2,,0,0000FF\n"),
        ("trips.txt", "route_id,service_id,trip_id\n1,s,t1\n2,s,t2\n"),
        (
            "stop_times.txt",
            "trip_id,arrival_time,departure_time,stop_id,stop_sequence
t1,06:00:00,06:00:00,a,1
t1,06:02:00,06:02:00,b,2
t1,06:04:00,06:04:00,c,3
t1,06:06:00,06:06:00,d,4
t2,06:00:00,06:00:00,a,1
t2,06:02:00,06:02:00,b,2
t2,06:04:00,06:04:00,c,3
t2,06:06:00,06:06:00,e,4
",
        ),
    ];
    fs::create_dir_all(dir).unwrap();
    for (name, text) in files {
        fs::write(dir.join(name), text).unwrap();
    }
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}
