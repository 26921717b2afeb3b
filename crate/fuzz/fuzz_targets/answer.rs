#![no_main]

use libfuzzer_sys::fuzz_target;
use topocoord::tasks::{parse_answer, Answer, TaskContext, TaskKind};
use topocoord::topology::Graph;

fuzz_target!(|data: &[u8]| {
    let raw = String::from_utf8_lossy(data);
    let g = Graph::star(5).unwrap();
    for task in TaskKind::ALL {
        let ctx = TaskContext::new(task, &g, Some(1));
        match parse_answer(task, &raw, &ctx) {
            Answer::Color(c) => assert!(task == TaskKind::Coloring && c < ctx.palette_size),
            Answer::Partner(_) => assert_eq!(task, TaskKind::Matching),
            Answer::Bit(b) => assert!(task == TaskKind::Consensus && b <= 1),
            Answer::Decision(_) => {
                assert!(matches!(task, TaskKind::VertexCover | TaskKind::LeaderElection))
            }
            Answer::Invalid => {}
        }
    }
});
