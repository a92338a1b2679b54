//! Command-line driver: preprocess → embed → train → predict → evaluate, plus
//! the `ablate` grid over classifiers and feature layouts.

pub mod args;
pub mod commands;
pub mod config;
pub mod split;

use anyhow::Result;

use args::{Cli, Command};
use config::RunConfig;

pub fn run(cli: Cli) -> Result<()> {
    let base = RunConfig::from_file(cli.config.as_deref())?;
    match cli.command {
        Command::Preprocess(a) => {
            let mut cfg = base.with_data(&a.data).with_pipeline(&a.pipeline).with_out(&a.out);
            if a.glove.is_some() {
                cfg.glove = a.glove;
            }
            commands::cmd_preprocess(&cfg)
        }
        Command::Embed(a) => {
            let cfg = base
                .with_data(&a.data)
                .with_source(&a.source)
                .with_pipeline(&a.pipeline)
                .with_layout(a.layout)
                .with_out(&a.out);
            commands::cmd_embed(&cfg)
        }
        Command::Train(a) => {
            let cfg = base
                .with_data(&a.data)
                .with_source(&a.source)
                .with_pipeline(&a.pipeline)
                .with_split(&a.split)
                .with_layout(a.layout)
                .with_model(a.model)
                .with_out(&a.out);
            commands::cmd_train(&cfg, a.report.as_deref())
        }
        Command::Predict(a) => {
            let cfg = base
                .with_data(&a.data)
                .with_source(&a.source)
                .with_pipeline(&a.pipeline)
                .with_layout(a.layout)
                .with_out(&a.out);
            commands::cmd_predict(&cfg, &a.model)
        }
        Command::Evaluate(a) => commands::cmd_evaluate(&a.predictions, &a.gold, a.out.as_deref()),
        Command::Ablate(a) => {
            let cfg = base
                .with_data(&a.data)
                .with_source(&a.source)
                .with_pipeline(&a.pipeline)
                .with_split(&a.split)
                .with_out(&a.out);
            commands::cmd_ablate(&cfg)
        }
    }
}
