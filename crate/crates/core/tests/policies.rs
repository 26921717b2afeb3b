mod common;

use proptest::prelude::*;

use topocoord::engine::{initial_bits, run_episode, EngineConfig, EngineError};
use topocoord::policies::{
    estimate_tokens, parse_outbox, wire, ChatMessage, LlmClient, LlmConfig, PolicyError, PolicySpec,
    PromptTemplate, ScriptedPolicy,
};
use topocoord::runner::{run_cell, Cell, RunStatus};
use topocoord::tasks::{parse_answer, Answer, TaskContext, TaskKind};
use topocoord::topology::{generate, round_budget, Family, Graph, GraphSpec, TopologyVariant};

use common::{spawn_mock_chat, MockReply};

fn mock_config(endpoint: String) -> LlmConfig {
    LlmConfig {
        endpoint,
        model: "mock".into(),
        timeout_secs: 5.0,
        retries: 0,
        api_key_env: None,
        parallelism: 2,
        ..LlmConfig::default()
    }
}

fn k4_cell(task: TaskKind) -> Cell {
    Cell {
        task,
        family: Family::scale_free(),
        variant: TopologyVariant::Star,
        n: 4,
        seed: 2,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn consensus_settles_on_the_minimum(n in 4usize..40, seed in any::<u64>()) {
        let g = generate(&GraphSpec::new(Family::Delaunay, n, seed)).unwrap();
        let task = TaskKind::Consensus;
        let budget = round_budget(&g, task, n).unwrap();
        let ep = run_episode(&g, task, &ScriptedPolicy::new(task), budget, seed, &EngineConfig { max_rounds: 200, ..EngineConfig::default() }).unwrap();
        let min = initial_bits(task, n, seed).into_iter().flatten().min().unwrap();
        prop_assert_eq!(ep.answers(), vec![Answer::Bit(min); n]);
    }

    #[test]
    fn leader_is_the_maximum_id(n in 4usize..40, seed in any::<u64>()) {
        let g = generate(&GraphSpec::new(Family::small_world().fitted(n), n, seed)).unwrap();
        let task = TaskKind::LeaderElection;
        let budget = round_budget(&g, task, n).unwrap();
        let ep = run_episode(&g, task, &ScriptedPolicy::new(task), budget, seed, &EngineConfig { max_rounds: 200, ..EngineConfig::default() }).unwrap();
        let leaders: Vec<usize> = ep.answers().iter().enumerate().filter(|(_, a)| a.is_yes()).map(|(u, _)| u).collect();
        prop_assert_eq!(leaders, vec![n - 1]);
    }

    #[test]
    fn wire_round_trip(fields in prop::collection::btree_map("[a-z]{1,4}", "[a-z0-9,]{0,6}", 0..5)) {
        let encoded = wire::encode(fields.iter().map(|(k, v)| (k.as_str(), v.clone())));
        let decoded = wire::decode(&encoded);
        prop_assert_eq!(decoded.len(), fields.len());
        for (k, v) in &fields {
            prop_assert_eq!(decoded.get(k.as_str()).copied(), Some(v.as_str()));
        }
    }

    #[test]
    fn outbox_only_addresses_neighbors(text in "(TO [0-9]{1,2}: [a-z ]{0,8}\n|ALL: [a-z]{0,5}\n|[a-z :]{0,10}\n){0,6}") {
        let neighbors = [1, 3, 5];
        let outbox = parse_outbox(&text, &neighbors);
        prop_assert!(outbox.keys().all(|k| neighbors.contains(k)));
    }

    #[test]
    fn last_marker_wins(first in 0u8..2, last in 0u8..2, noise in "[a-z ]{0,20}") {
        let g = Graph::complete(4).unwrap();
        let ctx = TaskContext::new(TaskKind::Consensus, &g, Some(0));
        let raw = format!("FINAL: {first}\n{noise}\nfinal: {last}.");
        prop_assert_eq!(parse_answer(TaskKind::Consensus, &raw, &ctx), Answer::Bit(last));
    }

    #[test]
    fn estimate_is_a_ceiling(chars in 0usize..10_000) {
        let t = estimate_tokens(chars) as usize;
        prop_assert!(t * 4 >= chars && (t == 0 || (t - 1) * 4 < chars));
    }
}

#[test]
fn scripted_policies_are_deterministic_per_seed() {
    for task in TaskKind::ALL {
        let g = generate(&GraphSpec::new(Family::scale_free(), 30, 9)).unwrap();
        let budget = round_budget(&g, task, 30).unwrap().at_least(30);
        let run = || run_episode(&g, task, &ScriptedPolicy::new(task), budget, 9, &EngineConfig::default()).unwrap();
        let (a, b) = (run(), run());
        assert_eq!(a.transcript, b.transcript, "{task}");
        assert_eq!(a.answers(), b.answers(), "{task}");
    }
}

#[test]
fn missing_usage_is_estimated_and_flagged() {
    let content = "FINAL: 0";
    let (endpoint, _) = spawn_mock_chat(MockReply::ok(content, None));
    let client = LlmClient::new(mock_config(endpoint)).unwrap();
    let messages = [ChatMessage::new("system", "abcde"), ChatMessage::new("user", "fgh")];
    let reply = client.call_llm(&messages).unwrap();
    assert_eq!(reply.text, content);
    assert!(reply.usage.estimated);
    assert_eq!(reply.usage.prompt_tokens, 2);
    assert_eq!(reply.usage.completion_tokens, 2);

    let spec = PolicySpec::llm(mock_config(client.config().endpoint.clone()));
    let policy = spec.build(TaskKind::Consensus).unwrap();
    let out = run_cell(&k4_cell(TaskKind::Consensus), policy.as_ref(), &EngineConfig::default()).unwrap();
    assert!(out.record.tokens_estimated);
    assert!(out.record.tokens_total > 0);
    assert!(out.record.success);
}

#[test]
fn server_errors_become_policy_error_records() {
    let (endpoint, hits) = spawn_mock_chat(MockReply {
        status: 500,
        ..MockReply::ok("", None)
    });
    let config = LlmConfig {
        retries: 2,
        ..mock_config(endpoint)
    };
    let client = LlmClient::new(config.clone()).unwrap();
    match client.call_llm(&[ChatMessage::new("user", "hi")]) {
        Err(PolicyError::Status { status, .. }) => assert_eq!(status, 500),
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(hits.load(std::sync::atomic::Ordering::SeqCst), 3);

    let policy = PolicySpec::llm(config).build(TaskKind::Matching).unwrap();
    let out = run_cell(&k4_cell(TaskKind::Matching), policy.as_ref(), &EngineConfig::default()).unwrap();
    assert_eq!(out.record.status, RunStatus::PolicyError);
    assert!(!out.record.success);
}

#[test]
fn unreachable_endpoint_is_a_transport_error() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let endpoint = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    drop(listener);
    let client = LlmClient::new(mock_config(endpoint)).unwrap();
    assert!(matches!(
        client.call_llm(&[ChatMessage::new("user", "hi")]),
        Err(PolicyError::Transport(_) | PolicyError::Timeout(_))
    ));
}

#[test]
fn replies_without_marker_are_invalid() {
    let (endpoint, _) = spawn_mock_chat(MockReply::ok("ALL: thinking", Some((5, 5))));
    let policy = PolicySpec::llm(mock_config(endpoint)).build(TaskKind::VertexCover).unwrap();
    let g = Graph::complete(4).unwrap();
    let budget = round_budget(&g, TaskKind::VertexCover, 4).unwrap();
    let ep = run_episode(&g, TaskKind::VertexCover, policy.as_ref(), budget, 0, &EngineConfig::default()).unwrap();
    assert_eq!(ep.answers(), vec![Answer::Invalid; 4]);
    assert_eq!(ep.total_tokens().total(), 10 * 4 * 8);
    assert!(ep.transcript.iter().all(|m| m.content == "thinking"));
}

#[test]
fn templates_load_from_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("terse.toml"),
        "system = \"agent {self_id}\"\nuser = \"{task} round {round_display}/{total_rounds}\"\n",
    )
    .unwrap();
    let t = PromptTemplate::load(Some(dir.path()), "terse").unwrap();
    assert_eq!(t.id, "terse");
    assert!(matches!(
        PromptTemplate::load(Some(dir.path()), "absent"),
        Err(PolicyError::Template(_))
    ));
    assert_eq!(PromptTemplate::load(None, "default").unwrap(), PromptTemplate::default());

    let config = LlmConfig {
        template: "terse".into(),
        template_dir: Some(dir.path().to_path_buf()),
        ..mock_config("http://127.0.0.1:9/".into())
    };
    assert!(PolicySpec::llm(config).build(TaskKind::Consensus).is_ok());
}

#[test]
fn budget_cap_applies_to_llm_cells_without_calls() {
    let (endpoint, hits) = spawn_mock_chat(MockReply::ok("FINAL: 0", Some((1, 1))));
    let policy = PolicySpec::llm(mock_config(endpoint)).build(TaskKind::Consensus).unwrap();
    let cell = Cell {
        variant: TopologyVariant::Sequential,
        n: 50,
        ..k4_cell(TaskKind::Consensus)
    };
    let out = run_cell(&cell, policy.as_ref(), &EngineConfig::default()).unwrap();
    assert_eq!(out.record.status, RunStatus::BudgetExceeded);
    assert_eq!(hits.load(std::sync::atomic::Ordering::SeqCst), 0);
    let g = out.graph;
    let budget = round_budget(&g, TaskKind::Consensus, 50).unwrap();
    assert!(matches!(
        run_episode(&g, TaskKind::Consensus, policy.as_ref(), budget, 0, &EngineConfig::default()),
        Err(EngineError::BudgetExceeded { .. })
    ));
}
